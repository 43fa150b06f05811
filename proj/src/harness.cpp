#include "uhom/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>

#include "uhom/energy.hpp"
#include "uhom/errors.hpp"
#include "uhom/optimize.hpp"
#include "uhom/unfold.hpp"

namespace uhom {

int reciprocal_integer(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ContractError("epsilon must be positive");
  const double k = 1.0 / epsilon;
  const long r = std::lround(k);
  if (r < 1 || std::fabs(k - static_cast<double>(r)) > 1e-9 * k) {
    throw ContractError("epsilon = " + format_double(epsilon) + " is not 1/k for an integer k");
  }
  return static_cast<int>(r);
}

namespace {

void check_ladder(const std::vector<double>& eps) {
  if (eps.empty()) throw ContractError("epsilon ladder must not be empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    reciprocal_integer(eps[i]);
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ContractError("epsilon ladder must decrease strictly");
  }
}

LbfgsOptions lbfgs_options(const SolverConfig& s) {
  LbfgsOptions o;
  o.memory = s.memory;
  o.max_iters = s.max_iters;
  o.grad_tol = s.grad_tol;
  o.armijo = s.armijo;
  o.backtrack = s.backtrack;
  return o;
}

void finish_report(SweepReport& rep) {
  const double band = 1e-4 * (1.0 + std::fabs(rep.reference));
  rep.monotone = true;
  rep.max_cross_check = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const SweepRow& r = rep.rows[i];
    if (std::isfinite(r.cross_check)) rep.max_cross_check = std::max(rep.max_cross_check, r.cross_check);
    if (i == 0) continue;
    const SweepRow& p = rep.rows[i - 1];
    if (std::fabs(r.gap) > std::fabs(p.gap) + band) rep.monotone = false;
    const double g0 = std::fabs(p.gap);
    const double g1 = std::fabs(r.gap);
    const double floor = 1e-12 * (1.0 + std::fabs(rep.reference));
    rep.observed_orders.push_back(g0 > floor && g1 > floor
                                      ? std::log(g0 / g1) / std::log(p.epsilon / r.epsilon)
                                      : std::numeric_limits<double>::quiet_NaN());
  }
}

std::string spec_label(const IntegrandSpec& spec) {
  std::string s = spec.form() == IntegrandForm::Separable ? "separable:" : "constant_in_y:";
  return s + spec.potential().describe();
}

}  // namespace

SweepReport eps_sweep_affine(const IntegrandSpec& spec, const std::vector<double>& xi,
                             const SweepOptions& options, double f_hom_reference) {
  check_ladder(options.eps_ladder);
  if (static_cast<int>(xi.size()) != spec.xi_size()) throw ContractError("xi has the wrong size");
  const int N = spec.space_dim();
  const int r = options.resolution;

  SweepReport rep;
  rep.spec_id = spec_label(spec);
  rep.datum_id = "affine";
  rep.xi = xi;
  if (std::isnan(f_hom_reference)) {
    LadderOptions lo{options.t_ladder, r, options.solver, CellBoundary::Zero};
    const HomEstimate est = estimate_f_hom(spec, xi, lo);
    if (!est.any_success) throw SolverError("f_hom reference could not be computed");
    f_hom_reference = est.f_hom;
  }
  rep.reference = f_hom_reference;

  for (double eps : options.eps_ladder) {
    const int k = reciprocal_integer(eps);
    const Grid grid = Grid::uniform(Box::unit(N), k * r);
    const GradientEnergy E(spec, grid, false, xi, static_cast<double>(k), 1.0);
    const std::vector<std::uint8_t> fixed =
        E.skeleton_mask({grid.resolution(0), N > 1 ? grid.resolution(1) : 1});
    const auto precond = E.preconditioner();
    const Objective obj = [&E](std::span<const double> x, std::span<double> g) { return E(x, g); };

    const CellSolution cell = solve_cell(CellProblem{spec, xi, k, r, options.solver, CellBoundary::Zero});

    // Zero correction, then the cell minimizer mapped back: phi(x) = eps v(x / eps).
    std::vector<double> from_cell(cell.minimizer.values().begin(), cell.minimizer.values().end());
    for (double& v : from_cell) v /= k;
    const LbfgsOptions opt = lbfgs_options(options.solver);
    LbfgsResult best = minimize_lbfgs(obj, std::vector<double>(E.unknowns(), 0.0), fixed, opt, precond.get());
    LbfgsResult alt = minimize_lbfgs(obj, std::move(from_cell), fixed, opt, precond.get());
    if (!std::isfinite(best.value) || (std::isfinite(alt.value) && alt.value < best.value)) best = std::move(alt);
    if (!std::isfinite(best.value)) throw SolverError("non-finite energy in eps sweep");

    SweepRow row;
    row.epsilon = eps;
    row.energy = best.value;
    row.reference = rep.reference;
    row.gap = row.energy - rep.reference;
    row.cell_value = cell.f_t_value;
    row.cross_check = std::fabs(row.energy - row.cell_value) / std::max(std::fabs(row.cell_value), 1e-12);
    row.converged = best.converged;
    rep.rows.push_back(row);
  }
  finish_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------

Datum affine_datum(const std::vector<double>& xi, int dim, int components) {
  if (static_cast<int>(xi.size()) != dim * components) throw ContractError("xi has the wrong size");
  Datum u;
  u.id = "affine";
  u.dim = dim;
  u.components = components;
  u.value = [xi, dim, components](const Point& x) {
    std::vector<double> out(components, 0.0);
    for (int c = 0; c < components; ++c)
      for (int k = 0; k < dim; ++k) out[c] += xi[c * dim + k] * x[k];
    return out;
  };
  u.gradient = [xi](const Point&) { return xi; };
  return u;
}

Datum half_square_datum(int dim) {
  Datum u;
  u.id = "half_square";
  u.dim = dim;
  u.value = [dim](const Point& x) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += 0.5 * x[k] * x[k];
    return std::vector<double>{s};
  };
  u.gradient = [dim](const Point& x) { return std::vector<double>(x.begin(), x.begin() + dim); };
  return u;
}

Datum sine_datum(int dim) {
  Datum u;
  u.id = "sine";
  u.dim = dim;
  const double pi = std::numbers::pi;
  u.value = [dim, pi](const Point& x) {
    double s = 1.0 / pi;
    for (int k = 0; k < dim; ++k) s *= std::sin(pi * x[k]);
    return std::vector<double>{s};
  };
  u.gradient = [dim, pi](const Point& x) {
    std::vector<double> g(dim);
    for (int k = 0; k < dim; ++k) {
      double s = std::cos(pi * x[k]);
      for (int j = 0; j < dim; ++j) {
        if (j != k) s *= std::sin(pi * x[j]) / pi;
      }
      g[k] = s;
    }
    return g;
  };
  return u;
}

HomInterpolant::HomInterpolant(const HomTable& table) {
  if (table.entries.empty()) throw ContractError("cannot interpolate an empty table");
  const std::size_t m = table.entries.front().xi.size();
  axes_.resize(m);
  for (const HomEstimate& e : table.entries) {
    if (e.xi.size() != m) throw ContractError("table entries have mixed xi sizes");
    for (std::size_t k = 0; k < m; ++k) axes_[k].push_back(e.xi[k]);
  }
  std::size_t total = 1;
  for (auto& axis : axes_) {
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    total *= axis.size();
  }
  values_.assign(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> seen(total, false);
  for (const HomEstimate& e : table.entries) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto pos = std::lower_bound(axes_[k].begin(), axes_[k].end(), e.xi[k]) - axes_[k].begin();
      idx = idx * axes_[k].size() + static_cast<std::size_t>(pos);
    }
    values_[idx] = e.f_hom;
    seen[idx] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ContractError("hom table xi grid is not a full tensor grid");
  }
}

double HomInterpolant::operator()(std::span<const double> xi) const {
  const std::size_t m = axes_.size();
  if (xi.size() != m) throw ContractError("xi has the wrong size for the table");
  std::vector<std::size_t> lo(m);
  std::vector<double> frac(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& a = axes_[k];
    if (!(xi[k] >= a.front() && xi[k] <= a.back())) {
      throw ContractError("xi = " + format_double(xi[k]) + " outside the table range [" +
                          format_double(a.front()) + ", " + format_double(a.back()) +
                          "]; extrapolation refused");
    }
    if (a.size() == 1) {
      lo[k] = 0;
      frac[k] = 0.0;
      continue;
    }
    std::size_t i = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), xi[k]) - a.begin());
    i = std::clamp<std::size_t>(i, 1, a.size() - 1) - 1;
    lo[k] = i;
    frac[k] = (xi[k] - a[i]) / (a[i + 1] - a[i]);
  }
  double out = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const bool up = (corner >> k) & 1U;
      if (up && axes_[k].size() == 1) {
        w = 0.0;
        break;
      }
      w *= up ? frac[k] : 1.0 - frac[k];
      idx = idx * axes_[k].size() + lo[k] + (up ? 1 : 0);
    }
    if (w != 0.0) out += w * values_[idx];
  }
  return out;
}

SweepReport dirichlet_minimize(const IntegrandSpec& spec, const Datum& datum, const HomTable& hom,
                               const DirichletOptions& options) {
  check_ladder(options.eps_ladder);
  const int N = spec.space_dim();
  const int d = spec.target_dim();
  if (datum.dim != N || datum.components != d) throw ContractError("datum dimensions differ from the integrand's");
  const HomInterpolant interp(hom);

  SweepReport rep;
  rep.spec_id = spec_label(spec);
  rep.datum_id = datum.id;

  // Reference: midpoint rule of f_hom(grad u_datum).
  const int ref_res = N == 1 ? options.reference_resolution : std::min(options.reference_resolution, 256);
  const Grid ref_grid = Grid::uniform(Box::unit(N), ref_res);
  double reference = 0.0;
  const int m1 = N > 1 ? ref_res : 1;
  for (int i = 0; i < ref_res; ++i) {
    for (int j = 0; j < m1; ++j) {
      reference += interp(datum.gradient(ref_grid.cell_center({i, j})));
    }
  }
  rep.reference = reference * ref_grid.cell_volume();

  const int r = options.resolution;
  for (double eps : options.eps_ladder) {
    const int k = reciprocal_integer(eps);
    const Grid grid = Grid::uniform(Box::unit(N), k * r);
    const GradientEnergy E(spec, grid, false, {}, static_cast<double>(k), 1.0);
    const std::array<int, 2> block = options.pinning == Pinning::CellSkeleton
                                         ? std::array<int, 2>{r, r}
                                         : std::array<int, 2>{grid.resolution(0), N > 1 ? grid.resolution(1) : 1};
    const std::vector<std::uint8_t> fixed = E.skeleton_mask(block);
    const auto precond = E.preconditioner(block);
    const GridField start = sample_vector(datum.value, d, grid, Boundary::Free);
    const Objective obj = [&E](std::span<const double> x, std::span<double> g) { return E(x, g); };
    const LbfgsResult res = minimize_lbfgs(
        obj, std::vector<double>(start.values().begin(), start.values().end()), fixed,
        lbfgs_options(options.solver), precond.get());
    if (!std::isfinite(res.value)) throw SolverError("non-finite energy in Dirichlet sweep");
    SweepRow row;
    row.epsilon = eps;
    row.energy = res.value;
    row.reference = rep.reference;
    row.gap = row.energy - rep.reference;
    row.converged = res.converged;
    rep.rows.push_back(row);
  }
  finish_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------

Manufactured manufactured(const std::string& v_id, const std::string& V_id) {
  Manufactured m;
  m.v_id = v_id;
  m.V_id = V_id;
  if (v_id == "zero") {
    m.v = [](const Point&) { return 0.0; };
    m.grad_v = [](const Point&) { return std::vector<double>{0.0, 0.0}; };
  } else if (v_id == "half_square") {
    m.v = [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); };
    m.grad_v = [](const Point& x) { return std::vector<double>{x[0], x[1]}; };
  } else {
    throw ContractError("unknown manufactured v '" + v_id + "' (zero, half_square)");
  }
  const double two_pi = 2.0 * std::numbers::pi;
  if (V_id == "zero") {
    m.V = [](const Point&, const Point&) { return 0.0; };
  } else if (V_id == "sin_y") {
    m.V = [two_pi](const Point&, const Point& y) { return std::sin(two_pi * y[0]); };
  } else if (V_id == "x_sin_y") {
    m.V = [two_pi](const Point& x, const Point& y) { return x[0] * std::sin(two_pi * y[0]) / two_pi; };
  } else {
    throw ContractError("unknown manufactured V '" + V_id + "' (zero, sin_y, x_sin_y)");
  }
  return m;
}

UnfoldingCheckReport manufactured_unfolding_check(const Manufactured& m, int dim,
                                                  const std::vector<double>& eps_ladder,
                                                  const YoungFunction& B, int resolution) {
  check_ladder(eps_ladder);
  if (resolution < 1) throw ContractError("resolution must be positive");
  UnfoldingCheckReport rep;
  const Box omega = Box::unit(dim);
  for (double eps : eps_ladder) {
    const int k = reciprocal_integer(eps);
    const Grid grid = Grid::uniform(omega, k * resolution);
    // Unwrapped fast variable: V is Y-periodic, so x / eps needs no reduction.
    const GridField vh = sample(
        [&](const Point& x) {
          Point y{0.0, 0.0};
          for (int a = 0; a < dim; ++a) y[a] = x[a] / eps;
          return m.v(x) + eps * m.V(x, y);
        },
        grid, Boundary::Free);
    const GridField grad = gradient(vh);
    const EpsilonDecomposition dec = decompose(omega, eps);
    const UnfoldedField U = unfold(grad, dec, resolution);
    const std::vector<std::uint8_t> inside = interior_mask(dec, grid);
    const Grid& yg = U.y_grid();
    const double hy = 1.0 / resolution;
    const int n1 = dim > 1 ? grid.resolution(1) : 1;
    const int y1 = dim > 1 ? resolution : 1;

    std::vector<double> mags;
    mags.reserve(U.x_count() * U.y_count());
    for (std::size_t xc = 0; xc < U.x_count(); ++xc) {
      if (!inside[xc]) continue;
      const Index ci{static_cast<int>(xc / n1), static_cast<int>(xc % n1)};
      const Point x = grid.cell_center(ci);
      const std::vector<double> gv = m.grad_v(x);
      for (std::size_t yc = 0; yc < U.y_count(); ++yc) {
        const Index yi{static_cast<int>(yc / y1), static_cast<int>(yc % y1)};
        const Point ynode = yg.node(yi);
        const double V0 = m.V(x, ynode);
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
          Point yn = ynode;
          yn[a] += hy;
          const double target = gv[a] + (m.V(x, yn) - V0) / hy;
          const double diff = U.at(xc, yc, a) - target;
          s += diff * diff;
        }
        mags.push_back(std::sqrt(s));
      }
    }
    UnfoldingRow row;
    row.epsilon = eps;
    row.aligned = U.aligned();
    row.error = luxemburg_norm(B, mags, U.weight());
    rep.rows.push_back(row);
    rep.max_error = std::max(rep.max_error, row.error);
  }
  // Least-squares slope of log(error) against log(eps).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : rep.rows) {
    if (!(row.error > 0.0)) continue;
    const double lx = std::log(row.epsilon);
    const double ly = std::log(row.error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2) rep.observed_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

// ---------------------------------------------------------------------------

RelaxationReport relaxation_equivalence_check(const IntegrandSpec& spec,
                                              const std::vector<double>& xi_samples,
                                              const RelaxationOptions& options, int threads) {
  if (spec.space_dim() != 1 || spec.target_dim() != 1) {
    throw ContractError("relaxation check runs only for scalar 1D integrands");
  }
  auto env = std::make_shared<const ConvexEnvelope1d>(
      convex_envelope_1d(spec.potential(), options.lo, options.hi, options.samples));
  const IntegrandSpec relaxed = spec.with_potential(Potential::envelope(env));
  std::vector<std::vector<double>> grid;
  for (double x : xi_samples) grid.push_back({x});
  const HomTable plain = hom_table(spec, grid, options.ladder, threads);
  const HomTable relax = hom_table(relaxed, grid, options.ladder, threads);

  RelaxationReport rep;
  rep.tolerance = options.tolerance;
  for (std::size_t i = 0; i < xi_samples.size(); ++i) {
    RelaxationRow row;
    row.xi = xi_samples[i];
    row.f_hom = plain.entries[i].f_hom;
    row.f_hom_relaxed = relax.entries[i].f_hom;
    row.envelope = (*env)(row.xi);
    row.discrepancy = std::fabs(row.f_hom - row.f_hom_relaxed);
    const double scale = std::max({std::fabs(row.f_hom), std::fabs(row.f_hom_relaxed), options.floor});
    row.pass = std::isfinite(row.discrepancy) && row.discrepancy <= options.tolerance * scale;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

void write_sweep_csv(const SweepReport& report, std::ostream& os) {
  os << "epsilon,energy,reference,gap,cell_value,cross_check,converged\n";
  for (const SweepRow& r : report.rows) {
    os << format_double(r.epsilon) << ',' << format_double(r.energy) << ','
       << format_double(r.reference) << ',' << format_double(r.gap) << ','
       << format_double(r.cell_value) << ',' << format_double(r.cross_check) << ','
       << (r.converged ? 1 : 0) << '\n';
  }
}

}  // namespace uhom
