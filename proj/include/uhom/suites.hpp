#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uhom/config.hpp"

namespace uhom {

//! One checked property with its measured value.
struct Assertion {
  std::string name;
  double measured = 0.0;
  std::string relation = "<=";  // "<=", ">=" or "==" against threshold
  double threshold = 0.0;
  bool pass = false;
  Json detail = Json::object();
};

struct SuiteReport {
  std::string suite;
  std::vector<Assertion> assertions;
  //! (file name, CSV text) pairs with per-row data behind the assertions.
  std::vector<std::pair<std::string, std::string>> tables;
  bool pass() const;
  Json to_json() const;
};

//! "unfold", "two-scale", "sweep", "relaxation".
const std::vector<std::string>& suite_names();

//! Runs a suite on its effective config. ConfigError for an unknown suite.
SuiteReport run_suite(const std::string& suite, const Json& cfg, std::uint64_t seed, int threads);

}  // namespace uhom
