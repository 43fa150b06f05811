#include "uhom/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "uhom/errors.hpp"
#include "uhom/harness.hpp"
#include "uhom/parallel.hpp"
#include "uhom/unfold.hpp"

namespace uhom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Assertion check(std::string name, double measured, std::string relation, double threshold,
                Json detail = Json::object()) {
  Assertion a;
  a.name = std::move(name);
  a.measured = measured;
  a.relation = std::move(relation);
  a.threshold = threshold;
  if (a.relation == "<=") a.pass = measured <= threshold;
  else if (a.relation == ">=") a.pass = measured >= threshold;
  else a.pass = measured == threshold;
  a.detail = std::move(detail);
  return a;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// Sum of plane waves with a known Lipschitz constant.
struct WaveField {
  struct Wave {
    double amplitude;
    Point k;
    double phase;
  };
  std::vector<Wave> waves;
  double offset = 0.0;

  double operator()(const Point& x) const {
    double s = offset;
    for (const Wave& w : waves) s += w.amplitude * std::sin(kTwoPi * (w.k[0] * x[0] + w.k[1] * x[1]) + w.phase);
    return s;
  }
  double lipschitz() const {
    double L = 0.0;
    for (const Wave& w : waves) L += std::fabs(w.amplitude) * kTwoPi * std::hypot(w.k[0], w.k[1]);
    return L;
  }
};

WaveField random_waves(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_int_distribution<int> freq(-1, 1);
  WaveField f;
  f.offset = amp(rng);
  for (int i = 0; i < 4; ++i) {
    WaveField::Wave w{amp(rng), {0.0, 0.0}, phase(rng)};
    for (int a = 0; a < dim; ++a) w.k[a] = freq(rng);
    if (w.k[0] == 0.0 && w.k[1] == 0.0) w.k[0] = 1.0;
    f.waves.push_back(w);
  }
  return f;
}

// Least-squares slope of log(err) against log(eps).
double slope(const std::vector<double>& eps, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(err[i] > 0.0)) continue;
    const double x = std::log(eps[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> eps_list(const Json& cfg, const char* key) { return get_numbers(cfg, key, ""); }

// ----- unfold -----

SuiteReport unfold_suite(const Json& cfg, std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "unfold";
  const YoungFunction B = young_from_json(cfg.at("young"), "/young");
  const std::vector<double> ladder = eps_list(cfg, "eps_ladder");
  const std::vector<double> strong = eps_list(cfg, "strong_ladder");
  const int cpe = get_int(cfg, "cells_per_epsilon", "");
  const int fields = get_int(cfg, "fields", "");
  const double eps_u = get_number(cfg, "unaligned_epsilon", "");
  if (cpe < 1) throw ConfigError("/cells_per_epsilon: must be positive");
  if (fields < 1) throw ConfigError("/fields: must be positive");
  if (!(eps_u > 0.0 && eps_u < 1.0)) throw ConfigError("/unaligned_epsilon: must lie in (0, 1)");
  for (double e : ladder) reciprocal_integer(e);
  for (double e : strong) reciprocal_integer(e);

  double mod_defect = 0.0, norm_defect = 0.0, product_defect = 0.0, periodic_defect = 0.0,
         mean_defect = 0.0;
  bool estimate = true;
  std::ostringstream csv;
  csv << "dim,field,epsilon,modular_lhs,modular_rhs,modular_defect,norm_unfolded,norm_masked\n";
  const auto periodic_fn = [](const Point& y) {
    return std::sin(kTwoPi * y[0]) * std::cos(kTwoPi * y[1]) + 0.5 * std::cos(2.0 * kTwoPi * y[0]);
  };
  for (int dim = 1; dim <= 2; ++dim) {
    const Box omega = Box::unit(dim);
    for (int f = 0; f < fields; ++f) {
      const WaveField wf = random_waves(dim, derive_seed(seed, {1, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(f)}));
      const WaveField vf = random_waves(dim, derive_seed(seed, {2, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(f)}));
      for (double eps : ladder) {
        const int k = reciprocal_integer(eps);
        const Grid grid = Grid::uniform(omega, k * cpe);
        const GridField w = sample_cells(wf, grid);
        const GridField v = sample_cells(vf, grid);
        const EpsilonDecomposition dec = decompose(omega, eps);

        const ModularIdentityReport m = modular_identity_report(B, w, dec);
        const double md = m.defect / std::max(std::fabs(m.rhs_interior), 1e-300);
        const double nd = m.norm_defect / std::max(m.norm_masked, 1e-300);
        mod_defect = std::max(mod_defect, md);
        norm_defect = std::max(norm_defect, nd);
        estimate = estimate && m.estimate_holds;
        csv << dim << ',' << f << ',' << format_double(eps) << ',' << format_double(m.lhs) << ','
            << format_double(m.rhs_interior) << ',' << format_double(md) << ','
            << format_double(m.norm_unfolded) << ',' << format_double(m.norm_masked) << '\n';

        const UnfoldedField tw = unfold(w, dec, cpe);
        const UnfoldedField tv = unfold(v, dec, cpe);
        const UnfoldedField tuv = unfold(multiply(w, v), dec, cpe);
        const UnfoldedField prod = multiply(tw, tv);
        double scale = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < tuv.values().size(); ++i) {
          scale = std::max(scale, std::fabs(tuv.values()[i]));
          diff = std::max(diff, std::fabs(tuv.values()[i] - prod.values()[i]));
        }
        product_defect = std::max(product_defect, diff / std::max(scale, 1e-300));

        // M_Y(T_eps w) against the direct average over each eps-cell.
        const GridField mean = mean_value(tw);
        const int n1 = dim > 1 ? grid.resolution(1) : 1;
        const int cells1 = dim > 1 ? k : 1;
        std::vector<double> block(static_cast<std::size_t>(k) * cells1, 0.0);
        for (std::size_t c = 0; c < w.point_count(); ++c) {
          const int i0 = static_cast<int>(c / n1) / cpe;
          const int i1 = dim > 1 ? static_cast<int>(c % n1) / cpe : 0;
          block[static_cast<std::size_t>(i0) * cells1 + i1] += w.at(c);
        }
        const double per_block = std::pow(static_cast<double>(cpe), dim);
        for (std::size_t c = 0; c < mean.point_count(); ++c) {
          const int i0 = static_cast<int>(c / n1) / cpe;
          const int i1 = dim > 1 ? static_cast<int>(c % n1) / cpe : 0;
          const double direct = block[static_cast<std::size_t>(i0) * cells1 + i1] / per_block;
          mean_defect = std::max(mean_defect, std::fabs(mean.at(c) - direct) / (1.0 + std::fabs(direct)));
        }
      }
    }
    // Periodic samples: T_eps(g(./eps))(x, y) = g(y).
    for (double eps : ladder) {
      const int k = reciprocal_integer(eps);
      const Grid grid = Grid::uniform(omega, k * cpe);
      const GridField g = sample_cells(
          [&](const Point& x) { return periodic_fn(Point{x[0] / eps, dim > 1 ? x[1] / eps : 0.0}); }, grid);
      const UnfoldedField tg = unfold(g, decompose(omega, eps), cpe);
      for (std::size_t x = 0; x < tg.x_count(); ++x) {
        for (std::size_t y = 0; y < tg.y_count(); ++y) {
          const Index yi{static_cast<int>(dim > 1 ? y / cpe : y), static_cast<int>(dim > 1 ? y % cpe : 0)};
          Point yc = tg.y_grid().cell_center(yi);
          if (dim == 1) yc[1] = 0.0;
          periodic_defect = std::max(periodic_defect, std::fabs(tg.at(x, y) - periodic_fn(yc)));
        }
      }
    }
  }
  rep.tables.emplace_back("modular_identity.csv", csv.str());
  rep.assertions.push_back(check("modular_identity_relative_defect", mod_defect, "<=", 1e-12));
  rep.assertions.push_back(check("norm_identity_relative_defect", norm_defect, "<=", 1e-12));
  rep.assertions.push_back(check("norm_estimate_holds", estimate ? 1.0 : 0.0, "==", 1.0));
  rep.assertions.push_back(check("product_rule_relative_defect", product_defect, "<=", 1e-12));
  rep.assertions.push_back(check("periodic_sample_defect", periodic_defect, "<=", 1e-12));
  rep.assertions.push_back(check("mean_value_defect", mean_defect, "<=", 1e-12));

  // Strong convergence T_eps(w) -> w.
  double worst_ratio = 0.0;
  bool decreasing = true;
  Json distances = Json::array();
  std::ostringstream scsv;
  scsv << "dim,field,epsilon,sup_gap,bound,luxemburg_distance\n";
  for (int dim = 1; dim <= 2; ++dim) {
    const Box omega = Box::unit(dim);
    for (int f = 0; f < fields; ++f) {
      const WaveField wf = random_waves(dim, derive_seed(seed, {3, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(f)}));
      const double L = wf.lipschitz();
      double prev = std::numeric_limits<double>::infinity();
      for (double eps : strong) {
        const int k = reciprocal_integer(eps);
        const Grid grid = Grid::uniform(omega, k * cpe);
        const GridField w = sample_cells(wf, grid);
        const UnfoldedField tw = unfold(w, decompose(omega, eps), cpe);
        double gap = 0.0;
        std::vector<double> mags(tw.values().size());
        for (std::size_t x = 0; x < tw.x_count(); ++x) {
          for (std::size_t y = 0; y < tw.y_count(); ++y) {
            const double d = std::fabs(tw.at(x, y) - w.at(x));
            gap = std::max(gap, d);
            mags[x * tw.y_count() + y] = d;
          }
        }
        const double bound = L * std::sqrt(static_cast<double>(dim)) * eps;
        const double dist = luxemburg_norm(B, mags, tw.weight());
        worst_ratio = std::max(worst_ratio, gap / bound);
        if (!(dist < prev)) decreasing = false;
        prev = dist;
        scsv << dim << ',' << f << ',' << format_double(eps) << ',' << format_double(gap) << ','
             << format_double(bound) << ',' << format_double(dist) << '\n';
      }
    }
  }
  rep.tables.emplace_back("strong_convergence.csv", scsv.str());
  rep.assertions.push_back(check("strong_sup_gap_over_lipschitz_bound", worst_ratio, "<=", 1.0));
  rep.assertions.push_back(check("strong_luxemburg_distance_strictly_decreasing", decreasing ? 1.0 : 0.0, "==", 1.0));

  // u.c.i.: boundary-layer mass controls the integral gap.
  double slack = 0.0;
  double aligned_mass = 0.0, aligned_gap = 0.0;
  std::vector<double> strip_mass;
  std::ostringstream ucsv;
  ucsv << "dim,epsilon,aligned,lambda_mass,gap,lambda_mass_orlicz,gap_orlicz\n";
  for (int dim = 1; dim <= 2; ++dim) {
    const Box omega = Box::unit(dim);
    const auto wfn = [](const Point& x) { return 1.0 + x[0] + 0.5 * x[1]; };
    std::vector<std::pair<double, GridField>> unaligned, aligned;
    for (int j = 0; j < 5; ++j) {
      const double eps = eps_u / std::pow(2.0, j);
      const int res = static_cast<int>(std::lround(3.0 / eps));
      unaligned.emplace_back(eps, sample_cells(wfn, Grid::uniform(omega, res)));
    }
    for (double eps : strong) {
      aligned.emplace_back(eps, sample_cells(wfn, Grid::uniform(omega, reciprocal_integer(eps) * cpe)));
    }
    const auto ru = uci_defect(B, unaligned);
    const auto ra = uci_defect(B, aligned);
    for (const auto& r : ru) {
      slack = std::max({slack, r.gap - r.lambda_mass, r.gap_orlicz - r.lambda_mass_orlicz});
      if (dim == 1) strip_mass.push_back(r.lambda_mass);
    }
    for (const auto& r : ra) {
      aligned_mass = std::max(aligned_mass, r.lambda_mass);
      aligned_gap = std::max(aligned_gap, r.gap);
    }
    for (const auto* set : {&ru, &ra}) {
      for (const auto& r : *set) {
        ucsv << dim << ',' << format_double(r.epsilon) << ',' << (r.aligned ? 1 : 0) << ','
             << format_double(r.lambda_mass) << ',' << format_double(r.gap) << ','
             << format_double(r.lambda_mass_orlicz) << ',' << format_double(r.gap_orlicz) << '\n';
      }
    }
  }
  rep.tables.emplace_back("uci.csv", ucsv.str());
  rep.assertions.push_back(check("uci_gap_minus_lambda_mass", slack, "<=", 1e-12));
  rep.assertions.push_back(check("uci_lambda_mass_decay_last_over_first",
                                 strip_mass.back() / strip_mass.front(), "<=", 0.25));
  rep.assertions.push_back(check("uci_aligned_lambda_mass", aligned_mass, "==", 0.0));
  rep.assertions.push_back(check("uci_aligned_gap", aligned_gap, "<=", 1e-13));
  return rep;
}

// ----- two-scale -----

SuiteReport two_scale_suite(const Json& cfg) {
  SuiteReport rep;
  rep.suite = "two-scale";
  const YoungFunction B = young_from_json(cfg.at("young"), "/young");
  const std::vector<double> ladder = eps_list(cfg, "eps_ladder");
  const int res = get_int(cfg, "resolution", "");
  const int res2 = get_int(cfg, "resolution_2d", "");
  const double min_order = get_number(cfg, "min_order", "");
  if (res < 2 || res2 < 2) throw ConfigError("/resolution: must be >= 2");

  std::ostringstream csv;
  csv << "case,dim,epsilon,error\n";
  auto record = [&](const std::string& name, int dim, const UnfoldingCheckReport& r) {
    for (const auto& row : r.rows) {
      csv << name << ',' << dim << ',' << format_double(row.epsilon) << ',' << format_double(row.error) << '\n';
    }
  };
  const Manufactured smooth = manufactured("half_square", "x_sin_y");
  const Manufactured flat = manufactured("zero", "sin_y");
  for (int dim = 1; dim <= 2; ++dim) {
    const int r = dim == 1 ? res : res2;
    const UnfoldingCheckReport a = manufactured_unfolding_check(smooth, dim, ladder, B, r);
    record("half_square+x_sin_y", dim, a);
    Json errs = Json::array();
    for (const auto& row : a.rows) errs.push_back(number(row.error));
    rep.assertions.push_back(check("manufactured_order_" + std::to_string(dim) + "d", a.observed_order, ">=",
                                   min_order, {{"errors", errs}}));
    const UnfoldingCheckReport b = manufactured_unfolding_check(flat, dim, ladder, B, r);
    record("zero+sin_y", dim, b);
    rep.assertions.push_back(check("x_independent_error_" + std::to_string(dim) + "d", b.max_error, "<=", 1e-10));
  }

  // sin^2 oscillation: pairing of sin(2 pi x/eps) with sin(2 pi y) is 1/2.
  double sin2 = 0.0;
  const TwoScaleMap sin_y = [](const Point&, const Point& y) { return std::sin(kTwoPi * y[0]); };
  for (double eps : ladder) {
    const Grid grid = Grid::uniform(Box::unit(1), reciprocal_integer(eps) * res);
    const GridField v = sample_cells([&](const Point& x) { return std::sin(kTwoPi * x[0] / eps); }, grid);
    sin2 = std::max(sin2, std::fabs(two_scale_pairing(v, sin_y, eps) - 0.5));
  }
  rep.assertions.push_back(check("oscillating_pairing_defect", sin2, "<=", 1e-10));

  // Dictionary pairings of v0(x, x/eps) converge to the limit pairing.
  const TwoScaleMap v0 = [](const Point& x, const Point& y) {
    return (1.0 + x[0] * x[0]) * (1.0 + 0.5 * std::sin(kTwoPi * y[0])) + 0.25 * std::cos(2.0 * kTwoPi * y[0]);
  };
  const auto dict = weak_dictionary(1);
  std::vector<double> limits;
  for (const auto& e : dict) limits.push_back(limit_pairing(v0, e.phi, Box::unit(1), 512, 64));
  std::vector<double> worst;
  for (double eps : ladder) {
    const Grid grid = Grid::uniform(Box::unit(1), reciprocal_integer(eps) * res);
    const GridField v = sample_cells(
        [&](const Point& x) { return v0(x, Point{x[0] / eps - std::floor(x[0] / eps), 0.0}); }, grid);
    double w = 0.0;
    for (std::size_t i = 0; i < dict.size(); ++i) {
      w = std::max(w, std::fabs(two_scale_pairing(v, dict[i].phi, eps) - limits[i]));
    }
    worst.push_back(w);
    csv << "dictionary,1," << format_double(eps) << ',' << format_double(w) << '\n';
  }
  // The pairing error is first order in eps: the cell-corner Riemann sum and the
  // in-cell drift of x do not cancel for y-dependent integrands.
  rep.assertions.push_back(check("dictionary_pairing_order", slope(ladder, worst), ">=", min_order,
                                 {{"entries", dict.size()}, {"error_finest", number(worst.back())}}));

  // M_Y(T_eps w) -> w in L^B.
  bool mean_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  const auto wfn = [](const Point& x) { return std::sin(kTwoPi * x[0]) + x[0] * x[0]; };
  for (double eps : ladder) {
    const Grid grid = Grid::uniform(Box::unit(1), reciprocal_integer(eps) * res);
    const GridField w = sample_cells(wfn, grid);
    const GridField m = mean_value(unfold(w, decompose(Box::unit(1), eps), res));
    std::vector<double> d(w.point_count());
    for (std::size_t c = 0; c < d.size(); ++c) d[c] = std::fabs(m.at(c) - w.at(c));
    const double dist = luxemburg_norm(B, d, grid.cell_volume());
    csv << "mean_value,1," << format_double(eps) << ',' << format_double(dist) << '\n';
    if (!(dist < prev)) mean_decreasing = false;
    prev = dist;
  }
  rep.assertions.push_back(check("mean_value_distance_strictly_decreasing", mean_decreasing ? 1.0 : 0.0, "==", 1.0));
  rep.tables.emplace_back("two_scale.csv", csv.str());
  return rep;
}

// ----- sweep -----

SuiteReport sweep_suite(const Json& cfg, std::uint64_t seed, int threads) {
  SuiteReport rep;
  rep.suite = "sweep";
  const IntegrandSpec spec = integrand_from_json(cfg.at("integrand"), "/integrand");
  const std::vector<double> xi = get_numbers(cfg, "xi", "");
  if (static_cast<int>(xi.size()) != spec.xi_size()) {
    throw ConfigError("/xi: needs " + std::to_string(spec.xi_size()) + " entries");
  }
  const SolverConfig solver = solver_from_json(cfg.at("solver"), "/solver", seed);
  SweepOptions so;
  so.eps_ladder = eps_list(cfg, "eps_ladder");
  so.resolution = get_int(cfg, "resolution", "");
  so.solver = solver;
  so.t_ladder = get_ints(cfg, "t_ladder", "");

  LadderOptions lo;
  lo.t_ladder = so.t_ladder;
  lo.resolution = so.resolution;
  lo.solver = solver;
  const HomEstimate ref = estimate_f_hom(spec, xi, lo);
  if (!ref.any_success) throw SolverError("f_hom reference solve failed");
  const SweepReport sw = eps_sweep_affine(spec, xi, so, ref.f_hom);
  std::ostringstream a;
  write_sweep_csv(sw, a);
  rep.tables.emplace_back("sweep_affine.csv", a.str());
  rep.assertions.push_back(check("affine_cross_check_relative", sw.max_cross_check, "<=", 1e-10));
  Json gaps = Json::array();
  for (const auto& r : sw.rows) gaps.push_back(number(r.gap));
  rep.assertions.push_back(check("affine_gaps_monotone", sw.monotone ? 1.0 : 0.0, "==", 1.0,
                                 {{"gaps", gaps}, {"f_hom", number(ref.f_hom)}}));

  LadderOptions lp = lo;
  lp.bc = CellBoundary::Periodic;
  const HomEstimate per = estimate_f_hom(spec, xi, lp);
  const double bc_diff = std::fabs(per.f_hom - ref.f_hom) / (1.0 + std::fabs(ref.f_hom));
  rep.assertions.push_back(check("periodic_vs_zero_bc_relative", bc_diff, "<=", 1e-6,
                                 {{"zero", number(ref.f_hom)}, {"periodic", number(per.f_hom)}}));

  const Json& dj = cfg.at("dirichlet");
  const std::string datum_id = get_string(dj, "datum", "/dirichlet");
  const int N = spec.space_dim();
  Datum datum;
  if (datum_id == "half_square") datum = half_square_datum(N);
  else if (datum_id == "sine") datum = sine_datum(N);
  else if (datum_id == "affine") datum = affine_datum(xi, N, spec.target_dim());
  else throw ConfigError("/dirichlet/datum: expected half_square, sine or affine");
  DirichletOptions dopt;
  dopt.eps_ladder = so.eps_ladder;
  dopt.resolution = get_int(dj, "resolution", "/dirichlet");
  dopt.solver = solver;
  const std::string pin = get_string(dj, "pinning", "/dirichlet");
  if (pin == "cell_skeleton") dopt.pinning = Pinning::CellSkeleton;
  else if (pin == "boundary") dopt.pinning = Pinning::Boundary;
  else throw ConfigError("/dirichlet/pinning: expected cell_skeleton or boundary");
  const double tol = get_number(dj, "gap_tolerance", "/dirichlet");
  const auto grid = xi_grid_from_json(dj.at("table"), spec.xi_size(), "/dirichlet/table");
  const HomTable table = hom_table(spec, grid, lo, threads);
  const SweepReport dr = dirichlet_minimize(spec, datum, table, dopt);
  std::ostringstream d;
  write_sweep_csv(dr, d);
  rep.tables.emplace_back("sweep_dirichlet.csv", d.str());
  const SweepRow& last = dr.rows.back();
  const double rel = std::fabs(last.gap) / std::max(std::fabs(last.reference), 1e-300);
  rep.assertions.push_back(check("dirichlet_relative_gap_finest", rel, "<=", tol,
                                 {{"epsilon", last.epsilon}, {"energy", number(last.energy)},
                                  {"reference", number(last.reference)}}));
  return rep;
}

// ----- relaxation -----

SuiteReport relaxation_suite(const Json& cfg, std::uint64_t seed, int threads) {
  SuiteReport rep;
  rep.suite = "relaxation";
  const IntegrandSpec spec = integrand_from_json(cfg.at("integrand"), "/integrand");
  RelaxationOptions opt;
  opt.ladder = ladder_from_json(cfg, seed);
  const Json& env = cfg.at("envelope");
  opt.lo = get_number(env, "lo", "/envelope");
  opt.hi = get_number(env, "hi", "/envelope");
  opt.samples = get_int(env, "samples", "/envelope");
  opt.tolerance = get_number(cfg, "tolerance", "");
  opt.floor = get_number(cfg, "floor", "");
  const std::vector<double> xi = get_numbers(cfg, "xi", "");
  const RelaxationReport r = relaxation_equivalence_check(spec, xi, opt, threads);
  const bool unit_coefficient = spec.coefficient_min() == 1.0 && spec.coefficient_max() == 1.0;

  std::ostringstream csv;
  csv << "xi,f_hom,f_hom_relaxed,envelope,discrepancy,pass\n";
  double worst = 0.0, worst_env = 0.0;
  for (const auto& row : r.rows) {
    csv << format_double(row.xi) << ',' << format_double(row.f_hom) << ',' << format_double(row.f_hom_relaxed)
        << ',' << format_double(row.envelope) << ',' << format_double(row.discrepancy) << ','
        << (row.pass ? 1 : 0) << '\n';
    const double scale = std::max({std::fabs(row.f_hom), std::fabs(row.f_hom_relaxed), opt.floor});
    worst = std::max(worst, std::isfinite(row.discrepancy) ? std::fabs(row.f_hom - row.f_hom_relaxed) / scale
                                                          : std::numeric_limits<double>::infinity());
    if (unit_coefficient) {
      worst_env = std::max(worst_env, std::fabs(row.f_hom - row.envelope) / std::max(std::fabs(row.envelope), opt.floor));
    }
  }
  rep.tables.emplace_back("relaxation.csv", csv.str());
  rep.assertions.push_back(check("f_vs_Qf_scaled_discrepancy", worst, "<=", opt.tolerance));
  if (unit_coefficient) {
    rep.assertions.push_back(check("f_hom_vs_envelope_scaled_discrepancy", worst_env, "<=", opt.tolerance));
  }
  return rep;
}

}  // namespace

bool SuiteReport::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

Json SuiteReport::to_json() const {
  Json j;
  j["suite"] = suite;
  j["pass"] = pass();
  j["assertions"] = Json::array();
  for (const Assertion& a : assertions) {
    j["assertions"].push_back({{"name", a.name},
                               {"measured", number(a.measured)},
                               {"relation", a.relation},
                               {"threshold", a.threshold},
                               {"pass", a.pass},
                               {"detail", a.detail}});
  }
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"unfold", "two-scale", "sweep", "relaxation"};
  return names;
}

SuiteReport run_suite(const std::string& suite, const Json& cfg, std::uint64_t seed, int threads) {
  if (suite == "unfold") return unfold_suite(cfg, seed);
  if (suite == "two-scale") return two_scale_suite(cfg);
  if (suite == "sweep") return sweep_suite(cfg, seed, threads);
  if (suite == "relaxation") return relaxation_suite(cfg, seed, threads);
  std::string list;
  for (const auto& n : suite_names()) list += (list.empty() ? "" : ", ") + n;
  throw ConfigError("unknown verify suite '" + suite + "' (available: " + list + ")");
}

}  // namespace uhom
