#include "uhom/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "uhom/errors.hpp"

namespace uhom {

namespace {

const char* kTwoPhase = R"({
  "form": "separable", "N": 1, "d": 1,
  "coefficient": {"kind": "piecewise", "axis": 0, "breaks": [0.5], "values": [1.0, 4.0]},
  "potential": {"kind": "power", "p": 2.0},
  "growth": {"B": {"kind": "power", "p": 2.0}, "M": 4.0, "a_bound": 0.0}
})";

const char* kDoubleWellTwoPhase = R"({
  "form": "separable", "N": 1, "d": 1,
  "coefficient": {"kind": "piecewise", "axis": 0, "breaks": [0.5], "values": [1.0, 2.0]},
  "potential": {"kind": "double_well"},
  "growth": {"B": {"kind": "power", "p": 4.0, "scale": 0.125}, "M": 16.0, "a_bound": 2.0}
})";

const char* kSolver = R"({
  "max_iters": 5000, "grad_tol": 1e-8, "restarts": 8, "memory": 20,
  "armijo": 1e-4, "backtrack": 0.5
})";

const char* kGrowthCheck = R"({"radius": 10.0, "y_resolution": 16, "xi_per_axis": 41})";

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key) + ": missing");
  return *it;
}

void overlay(Json& base, const Json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it->is_object() && !it->contains("kind") && base.contains(it.key()) &&
        base[it.key()].is_object()) {
      overlay(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"young.check",   "young.norm",     "hom.solve",
                                              "hom.table",     "verify.unfold",  "verify.two-scale",
                                              "verify.sweep",  "verify.relaxation"};
  return names;
}

Json default_config(const std::string& task) {
  Json c;
  c["schema_version"] = kSchemaVersion;
  c["task"] = task;
  c["seed"] = 0;
  if (task == "young.check") {
    c["young"] = {{"kind", "power"}, {"p", 2.0}};
    c["delta2"] = {{"t0", 1.0}, {"t_max", 1e6}, {"samples_per_decade", 50}};
    c["nabla2"] = {{"t0", 2.0}, {"t_max", 1e6}, {"samples_per_decade", 50}};
    c["complementary"] = {{"s_min", 1e-6}, {"s_max", 1e6}, {"points", 100000},
                          {"t_samples", {0.5, 1.0, 2.0}}};
  } else if (task == "young.norm") {
    c["young"] = {{"kind", "power"}, {"p", 2.0}};
    c["field"] = {{"kind", "random_fourier"}, {"dim", 1}, {"resolution", 256}, {"modes", 8},
                  {"amplitude", 1.0}, {"value", 1.0}};
    c["tol"] = kLuxemburgTol;
  } else if (task == "hom.solve" || task == "hom.table") {
    c["integrand"] = Json::parse(kTwoPhase);
    c["growth_check"] = Json::parse(kGrowthCheck);
    c["t_ladder"] = {1, 2, 4, 8};
    c["resolution"] = 64;
    c["bc"] = "zero";
    c["solver"] = Json::parse(kSolver);
    if (task == "hom.solve") {
      c["xi"] = {1.0};
    } else {
      c["xi_grid"] = {{"lo", {-2.0}}, {"hi", {2.0}}, {"step", 0.25}};
    }
  } else if (task == "verify.unfold") {
    c["young"] = {{"kind", "power"}, {"p", 2.0}};
    c["eps_ladder"] = {0.5, 0.25, 0.125};
    c["strong_ladder"] = {0.5, 0.25, 0.125, 0.0625};
    c["cells_per_epsilon"] = 8;
    c["unaligned_epsilon"] = 0.3;
    c["fields"] = 3;
  } else if (task == "verify.two-scale") {
    c["young"] = {{"kind", "power"}, {"p", 2.0}};
    c["eps_ladder"] = {0.25, 0.125, 0.0625, 0.03125};
    c["resolution"] = 16;
    c["resolution_2d"] = 8;
    c["min_order"] = 0.9;
  } else if (task == "verify.sweep") {
    c["integrand"] = Json::parse(kTwoPhase);
    c["xi"] = {1.0};
    c["eps_ladder"] = {0.5, 0.25, 0.125};
    c["resolution"] = 64;
    c["t_ladder"] = {1, 2, 4, 8};
    c["solver"] = Json::parse(kSolver);
    c["dirichlet"] = {{"datum", "half_square"},
                      {"resolution", 32},
                      {"pinning", "cell_skeleton"},
                      {"table", {{"lo", {-0.25}}, {"hi", {1.25}}, {"step", 0.0625}}},
                      {"gap_tolerance", 0.05}};
  } else if (task == "verify.relaxation") {
    c["integrand"] = Json::parse(kDoubleWellTwoPhase);
    c["xi"] = {0.0, 0.5, 1.5};
    c["t_ladder"] = {1, 2, 4, 8};
    c["resolution"] = 64;
    c["bc"] = "zero";
    c["solver"] = Json::parse(kSolver);
    c["envelope"] = {{"lo", -3.0}, {"hi", 3.0}, {"samples", 601}};
    c["tolerance"] = 0.02;
    c["floor"] = 1e-2;
  } else {
    std::string list;
    for (const auto& n : task_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown task '" + task + "' (known: " + list + ")");
  }
  return c;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

Json effective_config(const std::string& task, const Json& user_in) {
  Json cfg = default_config(task);
  if (user_in.is_null()) return cfg;
  if (!user_in.is_object()) throw ConfigError("config root must be a JSON object");
  const Json& user = user_in.contains("effective_config") ? user_in["effective_config"] : user_in;
  if (!user.is_object()) throw ConfigError("/effective_config: expected an object");
  if (user.contains("schema_version")) {
    if (!user["schema_version"].is_number_integer() || user["schema_version"].get<int>() != kSchemaVersion) {
      throw ConfigError("/schema_version: unsupported (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }
  if (user.contains("task")) {
    if (!user["task"].is_string() || user["task"].get<std::string>() != task) {
      throw ConfigError("/task: config is for '" + user["task"].dump() + "', command runs '" + task + "'");
    }
  }
  overlay(cfg, user);
  return cfg;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

double get_number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key) + ": must be finite");
  return x;
}

int get_int(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_string()) throw ConfigError(join(path, key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_array()) throw ConfigError(join(path, key) + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(join(path, key) + "/" + std::to_string(i) + ": expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<int> get_ints(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_array()) throw ConfigError(join(path, key) + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) throw ConfigError(join(path, key) + "/" + std::to_string(i) + ": expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

YoungFunction young_from_json(const Json& j, const std::string& path) {
  const YoungKind kind = [&] {
    try {
      return young_kind_from_string(get_string(j, "kind", path));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }();
  std::vector<double> params;
  if (j.contains("params")) params = get_numbers(j, "params", path);
  auto param = [&](const char* key, std::size_t idx, double fallback) {
    if (j.contains(key)) return get_number(j, key, path);
    if (params.size() > idx) return params[idx];
    return fallback;
  };
  try {
    switch (kind) {
      case YoungKind::Power: return YoungFunction::power(param("p", 0, 2.0), param("scale", 1, 1.0));
      case YoungKind::PowerLog: return YoungFunction::power_log(param("p", 0, 1.0));
      case YoungKind::ExpMinusLinear: return YoungFunction::exp_minus_linear();
      case YoungKind::SampledDensity:
        return YoungFunction::sampled_density(get_numbers(j, "knots", path), get_numbers(j, "density", path));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ": unsupported Young function");
}

Json young_to_json(const YoungFunction& B) {
  Json j;
  j["kind"] = to_string(B.kind());
  if (B.kind() == YoungKind::SampledDensity) {
    j["knots"] = std::vector<double>(B.knots().begin(), B.knots().end());
    j["density"] = std::vector<double>(B.density_samples().begin(), B.density_samples().end());
  } else {
    j["params"] = B.params();
  }
  return j;
}

namespace {

Coefficient coefficient_from_json(const Json& j, const std::string& path) {
  const std::string kind = get_string(j, "kind", path);
  if (kind == "constant") return Coefficient::constant(get_number(j, "value", path));
  if (kind == "piecewise") {
    return Coefficient::piecewise(j.contains("axis") ? get_int(j, "axis", path) : 0,
                                  get_numbers(j, "breaks", path), get_numbers(j, "values", path));
  }
  if (kind == "trig") {
    std::vector<int> wave{1, 0};
    if (j.contains("wave")) wave = get_ints(j, "wave", path);
    if (wave.empty() || wave.size() > 2) throw ConfigError(join(path, "wave") + ": expected 1 or 2 integers");
    if (wave.size() == 1) wave.push_back(0);
    return Coefficient::trig(get_number(j, "mean", path), get_number(j, "amplitude", path), {wave[0], wave[1]});
  }
  if (kind == "sampled") {
    return Coefficient::sampled(get_int(j, "dim", path), get_int(j, "resolution", path),
                                get_numbers(j, "values", path));
  }
  throw ConfigError(join(path, "kind") + ": unknown coefficient kind '" + kind +
                    "' (constant, piecewise, trig, sampled)");
}

Potential potential_from_json(const Json& j, const std::string& path) {
  const std::string kind = get_string(j, "kind", path);
  if (kind == "power") return Potential::power(get_number(j, "p", path));
  if (kind == "double_well") return Potential::double_well();
  if (kind == "quadratic") {
    const Json& rows = member(j, "matrix", path);
    if (!rows.is_array() || rows.empty()) throw ConfigError(join(path, "matrix") + ": expected a square array");
    const int n = static_cast<int>(rows.size());
    std::vector<double> a;
    for (int i = 0; i < n; ++i) {
      const Json& row = rows[i];
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw ConfigError(join(path, "matrix") + ": not square");
      }
      for (const auto& v : row) {
        if (!v.is_number()) throw ConfigError(join(path, "matrix") + ": expected numbers");
        a.push_back(v.get<double>());
      }
    }
    return Potential::quadratic(std::move(a), n);
  }
  throw ConfigError(join(path, "kind") + ": unknown potential kind '" + kind +
                    "' (power, double_well, quadratic)");
}

}  // namespace

IntegrandSpec integrand_from_json(const Json& j, const std::string& path) {
  try {
    const std::string form = get_string(j, "form", path);
    const int N = get_int(j, "N", path);
    const int d = get_int(j, "d", path);
    const Json& g = member(j, "growth", path);
    GrowthMetadata growth{young_from_json(member(g, "B", join(path, "growth")), join(path, "growth/B")),
                          get_number(g, "M", join(path, "growth")),
                          get_number(g, "a_bound", join(path, "growth"))};
    Potential W = potential_from_json(member(j, "potential", path), join(path, "potential"));
    if (form == "separable") {
      return IntegrandSpec::separable(
          coefficient_from_json(member(j, "coefficient", path), join(path, "coefficient")), std::move(W),
          std::move(growth), N, d);
    }
    if (form == "constant_in_y") return IntegrandSpec::constant_in_y(std::move(W), std::move(growth), N, d);
    throw ConfigError(join(path, "form") + ": unknown form '" + form + "' (separable, constant_in_y)");
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

SolverConfig solver_from_json(const Json& j, const std::string& path, std::uint64_t seed) {
  SolverConfig s;
  s.max_iters = get_int(j, "max_iters", path);
  s.grad_tol = get_number(j, "grad_tol", path);
  s.restarts = get_int(j, "restarts", path);
  s.memory = get_int(j, "memory", path);
  s.armijo = get_number(j, "armijo", path);
  s.backtrack = get_number(j, "backtrack", path);
  s.seed = seed;
  if (s.max_iters < 1 || !(s.grad_tol > 0.0) || s.restarts < 1 || s.memory < 1 ||
      !(s.armijo > 0.0 && s.armijo < 0.5) || !(s.backtrack > 0.0 && s.backtrack < 1.0)) {
    throw ConfigError(path + ": solver settings out of range");
  }
  return s;
}

LadderOptions ladder_from_json(const Json& cfg, std::uint64_t seed) {
  LadderOptions o;
  o.t_ladder = get_ints(cfg, "t_ladder", "");
  o.resolution = get_int(cfg, "resolution", "");
  const std::string bc = cfg.contains("bc") ? get_string(cfg, "bc", "") : "zero";
  if (bc == "zero") o.bc = CellBoundary::Zero;
  else if (bc == "periodic") o.bc = CellBoundary::Periodic;
  else throw ConfigError("/bc: expected 'zero' or 'periodic'");
  o.solver = solver_from_json(member(cfg, "solver", ""), "/solver", seed);
  if (o.resolution < 8) throw ConfigError("/resolution: must be >= 8");
  return o;
}

std::vector<std::vector<double>> xi_grid_from_json(const Json& j, int xi_size, const std::string& path) {
  std::vector<std::vector<double>> grid;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = path + "/" + std::to_string(i);
      if (!j[i].is_array()) throw ConfigError(p + ": expected an array of numbers");
      std::vector<double> xi;
      for (const auto& v : j[i]) {
        if (!v.is_number()) throw ConfigError(p + ": expected numbers");
        xi.push_back(v.get<double>());
      }
      if (static_cast<int>(xi.size()) != xi_size) {
        throw ConfigError(p + ": xi needs " + std::to_string(xi_size) + " entries");
      }
      grid.push_back(std::move(xi));
    }
    return grid;
  }
  const std::vector<double> lo = get_numbers(j, "lo", path);
  const std::vector<double> hi = get_numbers(j, "hi", path);
  const double step = get_number(j, "step", path);
  if (static_cast<int>(lo.size()) != xi_size || static_cast<int>(hi.size()) != xi_size) {
    throw ConfigError(path + ": lo/hi need " + std::to_string(xi_size) + " entries");
  }
  if (!(step > 0.0)) throw ConfigError(join(path, "step") + ": must be positive");
  std::vector<std::vector<double>> axes(xi_size);
  for (int k = 0; k < xi_size; ++k) {
    if (!(hi[k] >= lo[k])) throw ConfigError(path + ": hi must be >= lo");
    const long n = std::lround(std::floor((hi[k] - lo[k]) / step + 1e-9));
    for (long i = 0; i <= n; ++i) axes[k].push_back(lo[k] + static_cast<double>(i) * step);
  }
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  for (std::size_t t = 0; t < total; ++t) {
    std::vector<double> xi(xi_size);
    std::size_t r = t;
    for (int k = xi_size - 1; k >= 0; --k) {
      xi[k] = axes[k][r % axes[k].size()];
      r /= axes[k].size();
    }
    grid.push_back(std::move(xi));
  }
  return grid;
}

}  // namespace uhom
