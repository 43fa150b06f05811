#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace uhom {

inline constexpr const char* kToolName = "unfold-homog";
inline constexpr const char* kToolVersion = "0.1.0";

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCertificate = 2;
inline constexpr int kExitGrowth = 3;
inline constexpr int kExitNoSolve = 4;
inline constexpr int kExitAssertion = 5;

struct RunOptions {
  std::string command;  // young | hom | verify
  std::string sub;      // check, norm, solve, table, or a suite name
  std::optional<std::string> config_path;
  std::string out_dir = "unfold-homog-out";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::string format = "json";  // rendering of the stdout summary
};

//! Runs one command; writes outputs plus manifest.json under out_dir and returns the exit code.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace uhom
