#include "uhom/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "uhom/cell.hpp"
#include "uhom/config.hpp"
#include "uhom/digest.hpp"
#include "uhom/errors.hpp"
#include "uhom/integrand.hpp"
#include "uhom/parallel.hpp"
#include "uhom/suites.hpp"
#include "uhom/young.hpp"

namespace uhom {

namespace {

namespace fs = std::filesystem;

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects output files so the manifest can list them with digests.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& text) {
    fs::create_directories(dir_);
    const fs::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write output file '" + p.string() + "'");
    os << text;
    os.close();
    files_.push_back({{"path", name}, {"sha256", sha256_hex(text)}, {"bytes", text.size()}});
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
  const Json& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  Json files_ = Json::array();
};

struct Outcome {
  int code = kExitOk;
  std::string status = "ok";
  Json summary;         // printed with --format json
  std::string summary_csv;  // printed with --format csv
};

std::string key_value_csv(const Json& j) {
  std::ostringstream os;
  os << "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_primitive()) os << it.key() << ',' << it->dump() << '\n';
  }
  return os.str();
}

Json certificate_json(const GrowthCertificate& c) {
  return {{"condition", to_string(c.condition)},
          {"passed", c.passed},
          {"t0", c.t0},
          {"constant", number(c.constant)},
          {"sup_ratio_observed", number(c.sup_ratio_observed)},
          {"t_min", c.t_min},
          {"t_max", c.t_max},
          {"samples", c.samples}};
}

// ----- young -----

Outcome young_check(const Json& cfg, OutputDir& out) {
  const YoungFunction B = young_from_json(cfg.at("young"), "/young");
  const Json& d2 = cfg.at("delta2");
  const Json& n2 = cfg.at("nabla2");
  const GrowthCertificate delta = delta2_certificate(
      B, get_number(d2, "t0", "/delta2"), get_number(d2, "t_max", "/delta2"),
      static_cast<std::size_t>(get_int(d2, "samples_per_decade", "/delta2")));
  const std::vector<double> betas = default_beta_grid();
  const GrowthCertificate nabla = nabla2_certificate(
      B, get_number(n2, "t0", "/nabla2"), get_number(n2, "t_max", "/nabla2"), betas,
      static_cast<std::size_t>(get_int(n2, "samples_per_decade", "/nabla2")));
  const YoungInvariants inv = check_invariants(B);

  Json comp;
  const Json& cj = cfg.at("complementary");
  LegendreGrid lg;
  lg.s_min = get_number(cj, "s_min", "/complementary");
  lg.s_max = get_number(cj, "s_max", "/complementary");
  lg.points = static_cast<std::size_t>(get_int(cj, "points", "/complementary"));
  const std::vector<double> ts = get_numbers(cj, "t_samples", "/complementary");
  bool comp_ok = true;
  try {
    const YoungFunction Bt = complementary(B, ts, lg);
    Json vals = Json::array();
    for (double t : ts) vals.push_back({{"t", t}, {"value", number(Bt.value(t))}});
    comp = {{"ok", true}, {"samples", vals}};
  } catch (const CertificateError& e) {
    comp_ok = false;
    comp = {{"ok", false}, {"error", e.what()}};
  }

  const bool inv_ok = inv.zero_at_origin && inv.nondecreasing && inv.convex && inv.sublinear_at_zero &&
                      inv.superlinear_at_infinity;
  Json rep;
  rep["young"] = young_to_json(B);
  rep["description"] = B.describe();
  rep["invariants"] = {{"ok", inv_ok},
                       {"zero_at_origin", inv.zero_at_origin},
                       {"nondecreasing", inv.nondecreasing},
                       {"convex", inv.convex},
                       {"sublinear_at_zero", inv.sublinear_at_zero},
                       {"superlinear_at_infinity", inv.superlinear_at_infinity},
                       {"ratio_at_min", number(inv.ratio_at_min)},
                       {"ratio_at_max", number(inv.ratio_at_max)}};
  rep["delta2"] = certificate_json(delta);
  rep["nabla2"] = certificate_json(nabla);
  rep["complementary"] = comp;
  const bool pass = delta.passed && nabla.passed && comp_ok && inv_ok;
  rep["pass"] = pass;
  out.write_json("young_check.json", rep);

  Outcome o;
  o.code = pass ? kExitOk : kExitCertificate;
  o.status = pass ? "ok" : "certificate_failure";
  o.summary = rep;
  o.summary_csv = "condition,passed,constant,sup_ratio_observed\n" + std::string("delta2,") +
                  (delta.passed ? "1," : "0,") + format_double(delta.constant) + ',' +
                  format_double(delta.sup_ratio_observed) + "\nnabla2," + (nabla.passed ? "1," : "0,") +
                  format_double(nabla.constant) + ',' + format_double(nabla.sup_ratio_observed) + '\n';
  return o;
}

GridField norm_field(const Json& fj, std::uint64_t seed) {
  const std::string kind = get_string(fj, "kind", "/field");
  const int dim = get_int(fj, "dim", "/field");
  const int res = get_int(fj, "resolution", "/field");
  if (dim < 1 || dim > 2) throw ConfigError("/field/dim: must be 1 or 2");
  if (res < 1) throw ConfigError("/field/resolution: must be positive");
  const Grid grid = Grid::uniform(Box::unit(dim), res);
  if (kind == "constant") {
    const double v = get_number(fj, "value", "/field");
    return sample_cells([v](const Point&) { return v; }, grid);
  }
  if (kind != "random_fourier") throw ConfigError("/field/kind: expected random_fourier or constant");
  const int modes = get_int(fj, "modes", "/field");
  const double amplitude = get_number(fj, "amplitude", "/field");
  if (modes < 1) throw ConfigError("/field/modes: must be positive");
  std::mt19937_64 rng(derive_seed(seed, {0x6e6f726dULL}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> freq(-modes, modes);
  struct Mode {
    double a, b;
    int k0, k1;
  };
  std::vector<Mode> ms;
  for (int i = 0; i < modes; ++i) {
    Mode m{normal(rng), normal(rng), dim == 1 ? i + 1 : freq(rng), dim == 1 ? 0 : freq(rng)};
    if (m.k0 == 0 && m.k1 == 0) m.k0 = 1;
    ms.push_back(m);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return sample_cells(
      [&](const Point& x) {
        double s = 0.0;
        for (const Mode& m : ms) {
          const double ph = two_pi * (m.k0 * x[0] + m.k1 * x[1]);
          s += (m.a * std::cos(ph) + m.b * std::sin(ph)) / std::hypot(m.k0, m.k1);
        }
        return amplitude * s;
      },
      grid);
}

Outcome young_norm(const Json& cfg, std::uint64_t seed, OutputDir& out) {
  const YoungFunction B = young_from_json(cfg.at("young"), "/young");
  const GridField u = norm_field(cfg.at("field"), seed);
  const double tol = get_number(cfg, "tol", "");
  if (!(tol > 0.0)) throw ConfigError("/tol: must be positive");
  Outcome o;
  Json rep;
  rep["young"] = young_to_json(B);
  rep["points"] = u.point_count();
  rep["modular"] = number(modular(B, u));
  try {
    const double k = luxemburg_norm(B, u, tol);
    rep["luxemburg_norm"] = number(k);
    rep["modular_at_norm"] = k > 0.0 ? number(modular(B, scaled(u, 1.0 / k))) : Json(0.0);
    rep["pass"] = true;
  } catch (const DivergenceError& e) {
    rep["luxemburg_norm"] = nullptr;
    rep["error"] = e.what();
    rep["pass"] = false;
    o.code = kExitCertificate;
    o.status = "divergence";
  }
  out.write_json("young_norm.json", rep);
  std::ostringstream f;
  write_csv(u, f);
  out.write("field.csv", f.str());
  o.summary = rep;
  o.summary_csv = key_value_csv(rep);
  return o;
}

// ----- hom -----

Json growth_json(const GrowthReport& g, const IntegrandSpec& spec) {
  Json xi = Json::array();
  for (double v : g.worst_lower_xi) xi.push_back(v);
  return {{"accepted", g.accepted()},
          {"lower_ok", g.lower_ok},
          {"upper_ok", g.upper_ok},
          {"worst_lower_margin", number(g.worst_lower_margin)},
          {"worst_lower_xi", xi},
          {"worst_upper_margin", number(g.worst_upper_margin)},
          {"declared_B", young_to_json(spec.growth().B)},
          {"declared_M", spec.growth().M},
          {"declared_a_bound", spec.growth().a_bound},
          {"fitted_a_bound", number(g.fitted_a_bound)},
          {"fitted_M", number(g.fitted_M)}};
}

Json table_json(const HomTable& t) {
  Json j;
  j["t_ladder"] = t.t_ladder;
  j["entries"] = Json::array();
  for (const HomEstimate& e : t.entries) {
    Json f = Json::array(), z = Json::array(), d = Json::array(), fails = Json::array();
    for (double v : e.f_t) f.push_back(number(v));
    for (double v : e.zero_energy) z.push_back(number(v));
    for (double v : e.defects) d.push_back(number(v));
    for (const auto& s : e.failures) fails.push_back(s);
    std::vector<bool> conv(e.converged.begin(), e.converged.end());
    j["entries"].push_back({{"xi", e.xi},
                            {"f_hom", number(e.f_hom)},
                            {"f_t", f},
                            {"converged", conv},
                            {"zero_energy", z},
                            {"defects", d},
                            {"failures", fails},
                            {"stalled", e.stalled},
                            {"success", e.any_success}});
  }
  return j;
}

Outcome hom(const std::string& sub, const Json& cfg, std::uint64_t seed, int threads, OutputDir& out) {
  const IntegrandSpec spec = integrand_from_json(cfg.at("integrand"), "/integrand");
  const LadderOptions ladder = ladder_from_json(cfg, seed);
  std::vector<std::vector<double>> grid;
  if (sub == "solve") {
    const std::vector<double> xi = get_numbers(cfg, "xi", "");
    if (static_cast<int>(xi.size()) != spec.xi_size()) {
      throw ConfigError("/xi: needs " + std::to_string(spec.xi_size()) + " entries");
    }
    grid.push_back(xi);
  } else {
    grid = xi_grid_from_json(cfg.at("xi_grid"), spec.xi_size(), "/xi_grid");
  }

  const Json& gc = cfg.at("growth_check");
  const GrowthSamples samples = default_growth_samples(
      spec, get_number(gc, "radius", "/growth_check"), get_int(gc, "y_resolution", "/growth_check"),
      get_int(gc, "xi_per_axis", "/growth_check"));
  const GrowthReport growth = growth_check(spec, spec.growth().B, samples);
  const Json gj = growth_json(growth, spec);
  out.write_json("growth_report.json", gj);
  Outcome o;
  if (!growth.accepted()) {
    o.code = kExitGrowth;
    o.status = "growth_refused";
    o.summary = gj;
    o.summary_csv = key_value_csv(gj);
    return o;
  }

  const HomTable table = hom_table(spec, grid, ladder, threads);
  std::ostringstream csv;
  write_hom_csv(table, csv);
  out.write("hom_table.csv", csv.str());
  const Json tj = table_json(table);
  out.write_json("hom_table.json", tj);

  bool any = false;
  std::size_t ok = 0;
  for (const auto& e : table.entries) {
    any = any || e.any_success;
    ok += e.any_success ? 1 : 0;
  }
  o.code = any ? kExitOk : kExitNoSolve;
  o.status = any ? "ok" : "all_solves_failed";
  o.summary = {{"entries", table.entries.size()}, {"succeeded", ok}, {"table", tj}};
  std::ostringstream s;
  s << "xi,f_hom,success\n";
  for (const auto& e : table.entries) {
    for (std::size_t k = 0; k < e.xi.size(); ++k) s << (k ? ";" : "") << format_double(e.xi[k]);
    s << ',' << format_double(e.f_hom) << ',' << (e.any_success ? 1 : 0) << '\n';
  }
  o.summary_csv = s.str();
  return o;
}

// ----- verify -----

Outcome verify(const std::string& suite, const Json& cfg, std::uint64_t seed, int threads, OutputDir& out) {
  const SuiteReport r = run_suite(suite, cfg, seed, threads);
  for (const auto& [name, text] : r.tables) out.write(name, text);
  const Json j = r.to_json();
  out.write_json("verify_report.json", j);
  Outcome o;
  o.code = r.pass() ? kExitOk : kExitAssertion;
  o.status = r.pass() ? "ok" : "assertion_failure";
  o.summary = j;
  std::ostringstream s;
  s << "assertion,measured,relation,threshold,pass\n";
  for (const auto& a : r.assertions) {
    s << a.name << ',' << format_double(a.measured) << ',' << a.relation << ',' << format_double(a.threshold)
      << ',' << (a.pass ? 1 : 0) << '\n';
  }
  o.summary_csv = s.str();
  return o;
}

std::string task_of(const RunOptions& opt) {
  const std::string& c = opt.command;
  const std::string& s = opt.sub;
  if (c == "young" && (s == "check" || s == "norm")) return c + "." + s;
  if (c == "hom" && (s == "solve" || s == "table")) return c + "." + s;
  if (c == "verify") {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError("unknown verify suite '" + s + "' (available: " + list + ")");
    }
    return c + "." + s;
  }
  throw ConfigError("unknown command '" + c + (s.empty() ? "" : " " + s) +
                    "' (expected: young check|norm, hom solve|table, verify unfold|two-scale|sweep|relaxation)");
}

}  // namespace

int run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const std::string started = utc_now();
  std::string task;
  Json cfg;
  std::uint64_t seed = 0;
  try {
    task = task_of(opt);
    if (opt.format != "json" && opt.format != "csv") throw ConfigError("--format: expected csv or json");
    if (opt.threads < 1) throw ConfigError("--threads: must be at least 1");
    const Json user = opt.config_path ? load_json_file(*opt.config_path) : Json();
    cfg = effective_config(task, user);
    if (opt.seed) cfg["seed"] = *opt.seed;
    if (!cfg["seed"].is_number_unsigned()) {
      if (!cfg["seed"].is_number_integer() || cfg["seed"].get<std::int64_t>() < 0) {
        throw ConfigError("/seed: expected a non-negative integer");
      }
    }
    seed = cfg["seed"].get<std::uint64_t>();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  OutputDir dir(opt.out_dir);
  Outcome o;
  try {
    if (task == "young.check") o = young_check(cfg, dir);
    else if (task == "young.norm") o = young_norm(cfg, seed, dir);
    else if (task.rfind("hom.", 0) == 0) o = hom(opt.sub, cfg, seed, opt.threads, dir);
    else o = verify(opt.sub, cfg, seed, opt.threads, dir);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CertificateError& e) {
    err << "certificate failure: " << e.what() << '\n';
    o.code = kExitCertificate;
    o.status = "certificate_failure";
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    o.code = kExitCertificate;
    o.status = "divergence";
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    o.code = kExitNoSolve;
    o.status = "all_solves_failed";
  }

  Json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["command"] = opt.command + " " + opt.sub;
  manifest["task"] = task;
  manifest["seed"] = seed;
  manifest["threads"] = opt.threads;
  manifest["config_hash"] = sha256_hex(canonical_dump(cfg));
  manifest["effective_config"] = cfg;
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  manifest["status"] = o.status;
  manifest["exit_code"] = o.code;
  manifest["outputs"] = dir.files();
  try {
    fs::create_directories(dir.dir());
    std::ofstream ms(dir.dir() / "manifest.json");
    if (!ms) throw ConfigError("cannot write manifest in '" + dir.dir().string() + "'");
    ms << manifest.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (!o.summary.is_null() || !o.summary_csv.empty()) {
    if (opt.format == "json") out << o.summary.dump(2) << '\n';
    else out << o.summary_csv;
  }
  if (o.code != kExitOk && o.status != "ok") err << task << ": " << o.status << '\n';
  return o.code;
}

}  // namespace uhom
