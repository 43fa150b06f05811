#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "uhom/cell.hpp"
#include "uhom/field.hpp"
#include "uhom/integrand.hpp"
#include "uhom/young.hpp"

namespace uhom {

struct SweepRow {
  double epsilon = 0.0;
  double energy = 0.0;     // discrete minimum of int_Omega f(x/eps, grad u)
  double reference = 0.0;  // f_hom |Omega| or int f_hom(grad u)
  double gap = 0.0;        // energy - reference
  double cell_value = std::numeric_limits<double>::quiet_NaN();  // f_{1/eps} from solve_cell
  double cross_check = std::numeric_limits<double>::quiet_NaN();  // relative |energy - cell_value|
  bool converged = false;
};

struct SweepReport {
  std::string spec_id;
  std::string datum_id;
  std::vector<double> xi;
  double reference = 0.0;
  std::vector<SweepRow> rows;
  std::vector<double> observed_orders;  // between neighbouring rows; NaN when a gap vanishes
  //! gaps non-increasing along the ladder up to 1e-4 (1 + |reference|).
  bool monotone = true;
  double max_cross_check = 0.0;
};

//! k with eps = 1/k; ContractError unless 1/eps is a positive integer.
int reciprocal_integer(double epsilon);

struct SweepOptions {
  std::vector<double> eps_ladder{0.5, 0.25, 0.125};
  int resolution = 64;  // grid cells per eps-cell
  SolverConfig solver{};
  std::vector<int> t_ladder{1, 2, 4, 8};  // for the f_hom reference
};

/*!
 * Minimizes int_(0,1)^N f(x/eps, xi + grad phi) with phi = 0 on the boundary.
 *
 * The reference is f_hom(xi) from estimate_f_hom unless given. Each row also
 * solves the cell problem at t = 1/eps on the matching grid; after rescaling
 * v(y) = phi(eps y) / eps the two finite problems coincide.
 */
SweepReport eps_sweep_affine(const IntegrandSpec& spec, const std::vector<double>& xi,
                             const SweepOptions& options,
                             double f_hom_reference = std::numeric_limits<double>::quiet_NaN());

//! Boundary datum with its closed-form gradient.
struct Datum {
  std::string id;
  int dim = 1;
  int components = 1;
  VectorMap value;
  VectorMap gradient;  // d x N row-major
};
Datum affine_datum(const std::vector<double>& xi, int dim, int components);
//! |x|^2 / 2 (scalar).
Datum half_square_datum(int dim);
//! prod_k sin(pi x_k) / pi (scalar).
Datum sine_datum(int dim);

//! Piecewise-(multi)linear interpolation of f_hom over a tensor xi grid.
class HomInterpolant {
 public:
  explicit HomInterpolant(const HomTable& table);
  //! ContractError when xi lies outside the tabulated range.
  double operator()(std::span<const double> xi) const;
  double lower(int component) const { return axes_[component].front(); }
  double upper(int component) const { return axes_[component].back(); }

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<double> values_;  // row-major over axes_
};

enum class Pinning {
  Boundary,     // u = datum on the outer boundary only
  CellSkeleton  // u = datum on the boundary of every eps-cell
};

struct DirichletOptions {
  std::vector<double> eps_ladder{0.5, 0.25, 0.125};
  int resolution = 32;  // grid cells per eps-cell
  SolverConfig solver{};
  Pinning pinning = Pinning::CellSkeleton;
  int reference_resolution = 1024;  // midpoint cells per axis for int f_hom(grad u)
};

/*!
 * Discrete minimum of int f(x/eps, grad u) with u pinned to the datum, against
 * the reference int f_hom(grad u_datum) from the interpolated table.
 *
 * With CellSkeleton pinning every discrete minimizer agrees with the datum on
 * the eps-lattice, which forces u_eps -> u_datum; Boundary pinning only fixes
 * the outer boundary and then reproduces eps_sweep_affine for affine data.
 */
SweepReport dirichlet_minimize(const IntegrandSpec& spec, const Datum& datum, const HomTable& hom,
                               const DirichletOptions& options);

//! Smooth scalar maps for the manufactured unfolding check.
struct Manufactured {
  std::string v_id;
  std::string V_id;
  std::function<double(const Point&)> v;
  std::function<std::vector<double>(const Point&)> grad_v;
  std::function<double(const Point& x, const Point& y)> V;  // Y-periodic in y
};
//! v in {"zero", "half_square"}; V in {"zero", "sin_y", "x_sin_y"}.
Manufactured manufactured(const std::string& v_id, const std::string& V_id);

struct UnfoldingRow {
  double epsilon = 0.0;
  double error = 0.0;
  bool aligned = false;
};
struct UnfoldingCheckReport {
  std::vector<UnfoldingRow> rows;
  double observed_order = std::numeric_limits<double>::quiet_NaN();  // least-squares slope
  double max_error = 0.0;
};

/*!
 * Unfolds grad v_h for v_h = v + eps V(x, x/eps) and measures its Luxemburg
 * distance on Omega_hat x Y to grad v(x) + D_y V(x, y).
 *
 * D_y is the forward difference on the y-grid of `resolution` cells per axis,
 * the discrete counterpart of grad_y that the unfolded difference quotients
 * reproduce exactly; x is the base cell centre. Omega = (0,1)^dim.
 */
UnfoldingCheckReport manufactured_unfolding_check(const Manufactured& m, int dim,
                                                  const std::vector<double>& eps_ladder,
                                                  const YoungFunction& B, int resolution = 16);

struct RelaxationRow {
  double xi = 0.0;
  double f_hom = 0.0;
  double f_hom_relaxed = 0.0;
  double envelope = 0.0;  // Qf(xi) for a = 1
  double discrepancy = 0.0;
  bool pass = false;
};
struct RelaxationReport {
  std::vector<RelaxationRow> rows;
  double tolerance = 0.02;
  bool pass = true;
};

struct RelaxationOptions {
  LadderOptions ladder{};
  double lo = -3.0;
  double hi = 3.0;
  int samples = 601;
  double tolerance = 0.02;
  double floor = 1e-2;
};

/*!
 * f_hom from f versus f_hom from Qf (potential replaced by its convex envelope).
 *
 * Scalar 1D only. A row passes when |difference| <= tolerance * max(|f|, |Qf|, floor).
 */
RelaxationReport relaxation_equivalence_check(const IntegrandSpec& spec,
                                              const std::vector<double>& xi_samples,
                                              const RelaxationOptions& options, int threads = 1);

//! One row per eps: epsilon, energy, reference, gap, cell_value, cross_check, converged.
void write_sweep_csv(const SweepReport& report, std::ostream& os);

}  // namespace uhom
