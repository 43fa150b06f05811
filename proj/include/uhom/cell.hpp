#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uhom/field.hpp"
#include "uhom/integrand.hpp"

namespace uhom {

struct SolverConfig {
  int max_iters = 5000;
  double grad_tol = 1e-8;
  int restarts = 8;
  std::uint64_t seed = 0;
  int memory = 20;
  double armijo = 1e-4;
  double backtrack = 0.5;
};

enum class CellBoundary { Zero, Periodic };

struct CellProblem {
  IntegrandSpec spec;
  std::vector<double> xi;  // d x N, row-major
  int t = 1;
  int resolution = 16;  // cells per unit length
  SolverConfig solver{};
  CellBoundary bc = CellBoundary::Zero;
};

struct RestartRecord {
  std::string label;
  double energy = 0.0;
  bool finite = true;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

struct CellSolution {
  double f_t_value = 0.0;
  GridField minimizer;
  std::vector<RestartRecord> restarts;
  std::size_t best_restart = 0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  //! Energy of the zero competitor.
  double zero_energy = 0.0;
};

//! Grid of (0, t)^N with t * resolution cells per axis.
Grid cell_grid(int dim, int t, int resolution);

//! (1/t^N) times the midpoint sum of f(y_c, xi + D v) over tY; v must vanish on the boundary.
double cell_energy(const IntegrandSpec& spec, std::span<const double> xi, const GridField& v);

/*!
 * Approximates f_t(xi) by multi-start quasi-Newton on the cell energy.
 *
 * Starts, in order: zero; the tiled warm start (when given, a minimizer on
 * (0, t')^N with t' dividing t); sawtooth laminates for double-well
 * potentials; random smooth Fourier fields. The first `restarts` starts
 * besides the tiled one are used. Best energy wins, ties to the earlier start.
 */
CellSolution solve_cell(const CellProblem& problem, const GridField* warm_start = nullptr);

//! Periodic tiling of a (0, t')^N field onto (0, t)^N at the same resolution.
GridField tile_field(const GridField& v, int t);

struct HomEstimate {
  std::vector<double> xi;
  std::vector<int> t_ladder;
  std::vector<double> f_t;  // NaN where the solve failed
  std::vector<bool> converged;
  std::vector<double> zero_energy;
  std::vector<std::string> failures;  // empty string when the solve succeeded
  std::vector<double> defects;        // max(0, f_next - f_prev) between successful neighbours
  double f_hom = 0.0;
  bool stalled = false;  // last relative change <= 1e-3
  bool any_success = false;
};

struct LadderOptions {
  std::vector<int> t_ladder{1, 2, 4, 8};
  int resolution = 16;
  SolverConfig solver{};
  CellBoundary bc = CellBoundary::Zero;
};

//! f_hom(xi) as the minimum of f_t over the ladder, with subadditivity defects.
HomEstimate estimate_f_hom(const IntegrandSpec& spec, std::span<const double> xi,
                           const LadderOptions& options);

struct HomTable {
  std::vector<HomEstimate> entries;  // in xi_grid order
  std::vector<int> t_ladder;
};

//! One estimate per xi, computed in parallel; results do not depend on `threads`.
HomTable hom_table(const IntegrandSpec& spec, const std::vector<std::vector<double>>& xi_grid,
                   const LadderOptions& options, int threads = 1);

//! Columns xi_0.., t, f_t, converged; one row per (xi, t).
void write_hom_csv(const HomTable& table, std::ostream& os);

//! Shortest round-trip decimal form used in every text output.
std::string format_double(double x);

}  // namespace uhom
