#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "uhom/field.hpp"
#include "uhom/young.hpp"

namespace uhom {

/*!
 * Splitting of Omega into the union of whole epsilon-cells and the boundary layer.
 *
 * Xi_eps = {xi in Z^N : eps (xi + Y) subset Omega} is a product of integer ranges
 * [xi_lo[k], xi_hi[k]) per axis, so it is stored as those ranges.
 */
struct EpsilonDecomposition {
  double epsilon = 1.0;
  Box omega{};
  std::array<long, kMaxDim> xi_lo{0, 0};
  std::array<long, kMaxDim> xi_hi{0, 0};
  double measure_lambda = 0.0;

  bool empty() const { return cell_count() == 0; }
  std::size_t cell_count() const;
  std::vector<std::array<long, kMaxDim>> xi_set() const;
  double measure_interior() const;
};

EpsilonDecomposition decompose(const Box& omega, double epsilon);

/*!
 * Per-cell membership of a grid's cells in the interior union.
 *
 * A grid cell belongs to the interior only when it lies entirely inside some whole
 * epsilon-cell; partially covered cells are attributed to the boundary layer.
 */
std::vector<std::uint8_t> interior_mask(const EpsilonDecomposition& dec, const Grid& grid);

//! Whether unfolding w's grid at this epsilon is an exact re-indexing.
struct Alignment {
  bool aligned = false;
  Index cells_per_epsilon{1, 1};  // eps / h per axis
  Index offset{0, 0};             // grid cells between Omega's lower corner and eps*xi_lo
};
Alignment alignment(const EpsilonDecomposition& dec, const Grid& grid);

//! T_eps(w) sampled on (cells of the base grid over Omega) x (cells of a y-grid over Y).
class UnfoldedField {
 public:
  UnfoldedField(Grid base, int y_resolution, int components, double epsilon, bool aligned);

  const Grid& base() const { return base_; }
  const Grid& y_grid() const { return y_grid_; }
  int y_resolution() const { return y_grid_.resolution(0); }
  int components() const { return components_; }
  double epsilon() const { return epsilon_; }
  //! False when the map is a nearest-cell approximation rather than exact re-indexing.
  bool aligned() const { return aligned_; }

  std::size_t x_count() const { return base_.cell_count(); }
  std::size_t y_count() const { return y_grid_.cell_count(); }
  double& at(std::size_t x, std::size_t y, int c = 0) {
    return values_[(x * y_count() + y) * components_ + c];
  }
  double at(std::size_t x, std::size_t y, int c = 0) const {
    return values_[(x * y_count() + y) * components_ + c];
  }
  std::span<const double> values() const { return values_; }

  //! Quadrature weight of one (x-cell, y-cell) pair.
  double weight() const { return base_.cell_volume() * y_grid_.cell_volume(); }
  //! Euclidean norm over components at every (x, y) sample.
  std::vector<double> magnitudes() const;

 private:
  Grid base_;
  Grid y_grid_;
  int components_;
  double epsilon_;
  bool aligned_;
  std::vector<double> values_;
};

/*!
 * Discrete unfolding operator on the cells of w's grid.
 *
 * T_eps(w)(x, y) = w(eps [x/eps] + eps y) for x in the interior union, 0 on the
 * boundary layer. Node fields are first reduced to cell-centre values. When
 * eps / h is an integer on every axis, the eps-cells sit on grid lines and
 * y_resolution == eps / h, the result is an exact re-indexing of w's cell values;
 * otherwise w is sampled at the nearest cell and aligned() is false.
 */
UnfoldedField unfold(const GridField& w, const EpsilonDecomposition& dec, int y_resolution);

//! Pointwise product of two unfolded fields with matching layout.
UnfoldedField multiply(const UnfoldedField& u, const UnfoldedField& v);
//! Pointwise product of two fields (component 0 of each).
GridField multiply(const GridField& u, const GridField& v);

//! Modular and norm identities of the unfolding operator on aligned grids.
struct ModularIdentityReport {
  double lhs = 0.0;            // (1/|Y|) int int B(|T_eps w|)
  double rhs_full = 0.0;       // int_Omega B(|w|)
  double rhs_interior = 0.0;   // int over the interior union of B(|w|)
  double lambda_gap = 0.0;     // int over the boundary layer of B(|w|)
  double defect = 0.0;         // |lhs - rhs_interior|
  double norm_unfolded = 0.0;  // ||T_eps w|| in L^B(Omega x Y)
  double norm_masked = 0.0;    // ||w chi_interior|| in L^B(Omega)
  double norm_full = 0.0;      // ||w|| in L^B(Omega)
  double norm_defect = 0.0;
  bool estimate_holds = false;  // norm_unfolded <= (1 + |Y|) norm_full
};
//! Throws ContractError when the grid is not aligned with epsilon.
ModularIdentityReport modular_identity_report(const YoungFunction& B, const GridField& w,
                                              const EpsilonDecomposition& dec);

//! M_Y: average over y for every base cell.
GridField mean_value(const UnfoldedField& u);

struct UciRecord {
  double epsilon = 0.0;
  double lambda_mass = 0.0;         // int over the boundary layer of |w|
  double lambda_mass_orlicz = 0.0;  // int over the boundary layer of B(|w|)
  double gap = 0.0;                 // |int w - (1/|Y|) int int T_eps w|
  double gap_orlicz = 0.0;          // same for B(|w|)
  bool aligned = false;
};
//! One record per (epsilon, field) pair; y resolution eps/h when aligned, else 8.
std::vector<UciRecord> uci_defect(const YoungFunction& B,
                                  const std::vector<std::pair<double, GridField>>& sequence);

using TwoScaleMap = std::function<double(const Point& x, const Point& y)>;

//! Midpoint quadrature of v(x) phi(x, x/eps) over v's box.
double two_scale_pairing(const GridField& v, const TwoScaleMap& phi, double epsilon);
//! Midpoint quadrature of v0(x, y) phi(x, y) over Omega x Y.
double limit_pairing(const TwoScaleMap& v0, const TwoScaleMap& phi, const Box& omega,
                     int x_resolution, int y_resolution);

//! One entry of the fixed weak-convergence test dictionary.
struct DictionaryEntry {
  std::string name;
  TwoScaleMap phi;
};
/*!
 * Tensor products of monomials of total degree <= 2 in x with the trigonometric
 * monomials 1, cos(2 pi k . y), sin(2 pi k . y) for |k|_inf <= 3 (k up to sign).
 */
std::vector<DictionaryEntry> weak_dictionary(int dim);

}  // namespace uhom
