#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "uhom/cell.hpp"
#include "uhom/integrand.hpp"
#include "uhom/young.hpp"

namespace uhom {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

//! "young.check", "young.norm", "hom.solve", "hom.table", "verify.unfold", ...
const std::vector<std::string>& task_names();

//! Complete default configuration of a task (every key the task reads).
Json default_config(const std::string& task);

//! Parses a JSON file; ConfigError naming the path on I/O or syntax errors.
Json load_json_file(const std::string& path);

/*!
 * Defaults for `task` overlaid with the user document.
 *
 * A run manifest is accepted in place of a config; its embedded effective
 * config is used. Objects are merged key by key, except that an object
 * carrying "kind" replaces its default wholesale. schema_version must match
 * and a "task" entry, when present, must name `task`.
 */
Json effective_config(const std::string& task, const Json& user);

//! Canonical text of a config (sorted keys, no whitespace) for hashing.
std::string canonical_dump(const Json& j);

// Typed readers. `path` is the JSON pointer of j, used in error messages.
double get_number(const Json& j, const std::string& key, const std::string& path);
int get_int(const Json& j, const std::string& key, const std::string& path);
std::string get_string(const Json& j, const std::string& key, const std::string& path);
std::vector<double> get_numbers(const Json& j, const std::string& key, const std::string& path);
std::vector<int> get_ints(const Json& j, const std::string& key, const std::string& path);

YoungFunction young_from_json(const Json& j, const std::string& path);
Json young_to_json(const YoungFunction& B);
IntegrandSpec integrand_from_json(const Json& j, const std::string& path);
SolverConfig solver_from_json(const Json& j, const std::string& path, std::uint64_t seed);
//! Reads t_ladder, resolution, bc and solver from the config root.
LadderOptions ladder_from_json(const Json& cfg, std::uint64_t seed);
//! Either an explicit list of xi vectors or {"lo": [...], "hi": [...], "step": h}.
std::vector<std::vector<double>> xi_grid_from_json(const Json& j, int xi_size, const std::string& path);

}  // namespace uhom
