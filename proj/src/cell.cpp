#include "uhom/cell.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "uhom/energy.hpp"
#include "uhom/errors.hpp"
#include "uhom/optimize.hpp"
#include "uhom/parallel.hpp"

namespace uhom {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Grid cell_grid(int dim, int t, int resolution) {
  if (t < 1) throw ContractError("cell dilation t must be a positive integer");
  if (resolution < 1) throw ContractError("cell resolution must be positive");
  return Grid::uniform(Box::cube(dim, 0.0, static_cast<double>(t)), t * resolution);
}

namespace {

int cell_t_of(const GridField& v) {
  const double ext = v.grid().box().extent(0);
  const long t = std::lround(ext);
  if (t < 1 || std::fabs(ext - static_cast<double>(t)) > 1e-12 * ext) {
    throw ContractError("cell field must live on (0, t)^N for an integer t");
  }
  for (int k = 0; k < v.dim(); ++k) {
    if (v.grid().box().lower[k] != 0.0 || v.grid().box().extent(k) != ext) {
      throw ContractError("cell field must live on (0, t)^N for an integer t");
    }
  }
  return static_cast<int>(t);
}


// Sawtooth laminate between the two wells along axis 0, cut off near the
// other faces in 2D. Empty when xi admits no such laminate.
struct Laminate {
  std::vector<double> direction;  // a in R^d
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double lambda = 0.0;
};

std::optional<Laminate> double_well_laminate(std::span<const double> xi, int N, int d) {
  Laminate lam;
  lam.direction.assign(d, 0.0);
  double col_norm = 0.0;
  for (int c = 0; c < d; ++c) col_norm += xi[c * N] * xi[c * N];
  col_norm = std::sqrt(col_norm);
  if (col_norm > 0.0) {
    for (int c = 0; c < d; ++c) lam.direction[c] = xi[c * N] / col_norm;
  } else {
    lam.direction[0] = 1.0;
  }
  double b = 0.0;
  for (int c = 0; c < d; ++c) b += xi[c * N] * lam.direction[c];
  const double xi2 = frobenius_norm(xi) * frobenius_norm(xi);
  const double disc = b * b - xi2 + 1.0;
  if (!(disc > 0.0)) return std::nullopt;
  lam.alpha_plus = -b + std::sqrt(disc);
  lam.alpha_minus = -b - std::sqrt(disc);
  if (!(lam.alpha_plus > 0.0 && lam.alpha_minus < 0.0)) return std::nullopt;
  lam.lambda = -lam.alpha_minus / (lam.alpha_plus - lam.alpha_minus);
  return lam;
}

}  // namespace

double cell_energy(const IntegrandSpec& spec, std::span<const double> xi, const GridField& v) {
  if (static_cast<int>(xi.size()) != spec.xi_size()) throw ContractError("xi has the wrong size");
  if (v.dim() != spec.space_dim() || v.components() != spec.target_dim()) {
    throw ContractError("cell field dimensions differ from the integrand's");
  }
  if (v.centering() != Centering::Node) throw ContractError("cell field must be node-centred");
  const int t = cell_t_of(v);
  const bool periodic = v.boundary() == Boundary::Periodic;
  if (!periodic) {
    for (std::size_t p = 0; p < v.point_count(); ++p) {
      if (!v.on_boundary(v.unravel(p))) continue;
      for (int c = 0; c < v.components(); ++c) {
        if (v.at(p, c) != 0.0) throw ContractError("cell field violates the zero boundary condition");
      }
    }
  }
  const GradientEnergy E(spec, v.grid(), periodic, std::vector<double>(xi.begin(), xi.end()), 1.0,
                         1.0 / std::pow(static_cast<double>(t), spec.space_dim()));
  return E.value(v.values());
}

GridField tile_field(const GridField& v, int t) {
  const int t0 = cell_t_of(v);
  if (t % t0 != 0) throw ContractError("tiling needs t to be a multiple of the source dilation");
  const int res = v.grid().resolution(0) / t0;
  const Grid grid = cell_grid(v.dim(), t, res);
  GridField out = GridField::zeros(grid, v.components(), v.boundary(), Centering::Node);
  const int n0 = v.grid().resolution(0);
  for (std::size_t p = 0; p < out.point_count(); ++p) {
    Index idx = out.unravel(p);
    for (int k = 0; k < v.dim(); ++k) idx[k] %= n0;
    const std::size_t q = v.index(idx);
    for (int c = 0; c < v.components(); ++c) out.at(p, c) = v.at(q, c);
  }
  return out;
}

CellSolution solve_cell(const CellProblem& pb, const GridField* warm_start) {
  const IntegrandSpec& spec = pb.spec;
  const int N = spec.space_dim();
  const int d = spec.target_dim();
  if (static_cast<int>(pb.xi.size()) != spec.xi_size()) throw ContractError("xi has the wrong size");
  if (pb.t < 1) throw ContractError("cell dilation t must be >= 1");
  if (pb.resolution < 8) throw ContractError("cell resolution must be >= 8");
  if (pb.solver.restarts < 1) throw ContractError("restarts must be >= 1");
  for (double x : pb.xi) {
    if (!std::isfinite(x)) throw DataError("xi must be finite");
  }

  const bool periodic = pb.bc == CellBoundary::Periodic;
  const Grid grid = cell_grid(N, pb.t, pb.resolution);
  const GradientEnergy E(spec, grid, periodic, pb.xi, 1.0, 1.0 / std::pow(double(pb.t), N));
  const std::array<int, 2> whole{grid.resolution(0), N > 1 ? grid.resolution(1) : 1};
  const std::vector<std::uint8_t> fixed = E.skeleton_mask(whole);
  const auto precond = E.preconditioner();
  const Boundary field_bc = periodic ? Boundary::Periodic : Boundary::ZeroBoundary;
  const GridField layout = GridField::zeros(grid, d, field_bc, Centering::Node);
  const std::size_t n = E.unknowns();

  struct Start {
    std::string label;
    std::vector<double> x;
  };
  std::vector<Start> starts;
  starts.push_back({"zero", std::vector<double>(n, 0.0)});
  if (warm_start) {
    const GridField tiled = tile_field(*warm_start, pb.t);
    if (tiled.grid() == grid && tiled.components() == d && tiled.boundary() == field_bc) {
      starts.push_back({"tiled", std::vector<double>(tiled.values().begin(), tiled.values().end())});
    }
  }
  const int extra = pb.solver.restarts - 1;
  int added = 0;

  const double T = static_cast<double>(pb.t);
  const int n0 = grid.resolution(0);
  const double h = grid.spacing(0);
  if (spec.potential().kind() == Potential::Kind::DoubleWell) {
    if (auto lam = double_well_laminate(pb.xi, N, d)) {
      std::vector<int> periods;
      for (int m = 2; m <= n0; m *= 2) periods.push_back(m);
      std::stable_sort(periods.begin(), periods.end(), [&](int a, int b) {
        const double ea = std::fabs(lam->lambda * a - std::round(lam->lambda * a));
        const double eb = std::fabs(lam->lambda * b - std::round(lam->lambda * b));
        return ea < eb - 1e-12;
      });
      for (int m : periods) {
        if (added >= extra) break;
        const int plus = static_cast<int>(std::lround(lam->lambda * m));
        std::vector<double> profile(n0 + 1, 0.0);
        for (int i = 0; i < n0; ++i) {
          const double slope = (i % m) < plus ? lam->alpha_plus : lam->alpha_minus;
          profile[i + 1] = profile[i] + h * slope;
        }
        const double end = profile[n0];
        for (int i = 0; i <= n0; ++i) profile[i] -= end * i / n0;
        std::vector<double> x(n, 0.0);
        for (std::size_t p = 0; p < layout.point_count(); ++p) {
          const Index idx = layout.unravel(p);
          double cut = 1.0;
          if (N > 1) {
            const double y1 = layout.position(p)[1];
            cut = std::clamp(std::min(y1, T - y1), 0.0, 1.0);
          }
          for (int c = 0; c < d; ++c) x[p * d + c] = profile[idx[0]] * cut * lam->direction[c];
        }
        starts.push_back({"sawtooth_" + std::to_string(m), std::move(x)});
        ++added;
      }
    }
  }

  std::uint64_t key = derive_seed(pb.solver.seed, {static_cast<std::uint64_t>(pb.t),
                                                   static_cast<std::uint64_t>(pb.resolution)});
  for (double x : pb.xi) key = derive_seed(key, {double_key(x)});
  const double amplitude = 0.25 * (1.0 + frobenius_norm(pb.xi)) * T / std::numbers::pi;
  for (int r = 0; added < extra; ++r, ++added) {
    std::mt19937_64 rng(derive_seed(key, {static_cast<std::uint64_t>(r)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> mode(1, 4);
    std::vector<double> x(n, 0.0);
    for (int term = 0; term < 4; ++term) {
      std::array<int, 2> m{mode(rng), N > 1 ? mode(rng) : 0};
      std::vector<double> coeff(d);
      const double msq = double(m[0]) * m[0] + double(m[1]) * m[1];
      for (double& c : coeff) c = normal(rng) * amplitude / msq;
      for (std::size_t p = 0; p < layout.point_count(); ++p) {
        const Point y = layout.position(p);
        double shape = 1.0;
        for (int k = 0; k < N; ++k) {
          shape *= periodic ? std::sin(2.0 * std::numbers::pi * m[k] * y[k] / T)
                            : std::sin(std::numbers::pi * m[k] * y[k] / T);
        }
        for (int c = 0; c < d; ++c) x[p * d + c] += coeff[c] * shape;
      }
    }
    starts.push_back({"random_" + std::to_string(r), std::move(x)});
  }

  LbfgsOptions opt;
  opt.memory = pb.solver.memory;
  opt.max_iters = pb.solver.max_iters;
  opt.grad_tol = pb.solver.grad_tol;
  opt.armijo = pb.solver.armijo;
  opt.backtrack = pb.solver.backtrack;
  const Objective objective = [&E](std::span<const double> x, std::span<double> g) { return E(x, g); };

  CellSolution sol;
  sol.zero_energy = E.value(starts.front().x);
  std::optional<LbfgsResult> best;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i]) starts[s].x[i] = 0.0;
    }
    LbfgsResult r = minimize_lbfgs(objective, std::move(starts[s].x), fixed, opt, precond.get());
    RestartRecord rec;
    rec.label = starts[s].label;
    rec.finite = r.finite && std::isfinite(r.value);
    rec.energy = r.value;
    rec.converged = r.converged;
    rec.iterations = r.iterations;
    rec.grad_norm = r.grad_norm;
    sol.restarts.push_back(rec);
    if (rec.finite && (!best || r.value < best->value)) {
      best = std::move(r);
      sol.best_restart = s;
    }
  }
  if (!best) throw SolverError("every restart produced a non-finite energy");
  sol.f_t_value = best->value;
  sol.converged = best->converged;
  sol.iterations = best->iterations;
  sol.grad_norm = best->grad_norm;
  sol.minimizer = GridField(grid, d, field_bc, Centering::Node, std::move(best->x));
  return sol;
}

HomEstimate estimate_f_hom(const IntegrandSpec& spec, std::span<const double> xi,
                           const LadderOptions& options) {
  if (options.t_ladder.empty()) throw ContractError("t ladder must not be empty");
  for (std::size_t i = 0; i < options.t_ladder.size(); ++i) {
    if (options.t_ladder[i] < 1 || (i > 0 && options.t_ladder[i] <= options.t_ladder[i - 1])) {
      throw ContractError("t ladder must be strictly increasing positive integers");
    }
  }
  HomEstimate est;
  est.xi.assign(xi.begin(), xi.end());
  est.t_ladder = options.t_ladder;
  std::optional<GridField> previous;
  int previous_t = 0;
  for (int t : options.t_ladder) {
    CellProblem pb{spec, est.xi, t, options.resolution, options.solver, options.bc};
    try {
      const GridField* warm = previous && t % previous_t == 0 ? &*previous : nullptr;
      CellSolution sol = solve_cell(pb, warm);
      est.f_t.push_back(sol.f_t_value);
      est.converged.push_back(sol.converged);
      est.zero_energy.push_back(sol.zero_energy);
      est.failures.emplace_back();
      previous = std::move(sol.minimizer);
      previous_t = t;
    } catch (const SolverError& e) {
      est.f_t.push_back(std::numeric_limits<double>::quiet_NaN());
      est.converged.push_back(false);
      est.zero_energy.push_back(std::numeric_limits<double>::quiet_NaN());
      est.failures.emplace_back(e.what());
    }
  }
  est.f_hom = std::numeric_limits<double>::quiet_NaN();
  double last = std::numeric_limits<double>::quiet_NaN();
  for (double f : est.f_t) {
    if (std::isnan(f)) continue;
    if (!est.any_success || f < est.f_hom) est.f_hom = f;
    if (est.any_success) {
      est.defects.push_back(std::max(0.0, f - last));
      const double change = std::fabs(f - last);
      est.stalled = change <= 1e-3 * std::max(std::fabs(f), std::fabs(last));
    }
    est.any_success = true;
    last = f;
  }
  return est;
}

HomTable hom_table(const IntegrandSpec& spec, const std::vector<std::vector<double>>& xi_grid,
                   const LadderOptions& options, int threads) {
  HomTable table;
  table.t_ladder = options.t_ladder;
  table.entries.resize(xi_grid.size());
  parallel_for(xi_grid.size(), threads, [&](std::size_t i) {
    table.entries[i] = estimate_f_hom(spec, xi_grid[i], options);
  });
  return table;
}

void write_hom_csv(const HomTable& table, std::ostream& os) {
  std::size_t m = table.entries.empty() ? 0 : table.entries.front().xi.size();
  for (std::size_t k = 0; k < m; ++k) os << "xi_" << k << ',';
  os << "t,f_t,converged\n";
  for (const HomEstimate& e : table.entries) {
    for (std::size_t j = 0; j < e.t_ladder.size(); ++j) {
      for (double x : e.xi) os << format_double(x) << ',';
      os << e.t_ladder[j] << ',' << format_double(e.f_t[j]) << ',' << (e.converged[j] ? 1 : 0)
         << '\n';
    }
  }
}

}  // namespace uhom
