#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "uhom/field.hpp"
#include "uhom/integrand.hpp"
#include "uhom/optimize.hpp"

namespace uhom {

/*!
 * Discrete energy  normalization * sum_cells |cell| f(y_c, offset + D u)  of a node field u.
 *
 * D is the forward-difference cell gradient of `gradient` in field.hpp and
 * y_c = y_scale * (cell centre). Node layout follows GridField: res+1 nodes per
 * axis, or res with wrap-around when periodic. Coefficients a(y_c) are sampled
 * once at construction.
 */
class GradientEnergy {
 public:
  GradientEnergy(const IntegrandSpec& spec, Grid grid, bool periodic, std::vector<double> offset,
                 double y_scale, double normalization);

  const Grid& grid() const { return grid_; }
  bool periodic() const { return periodic_; }
  int components() const { return d_; }
  std::size_t node_count() const { return nodes_; }
  std::size_t unknowns() const { return nodes_ * d_; }
  double normalization() const { return normalization_; }
  const std::vector<double>& cell_coefficients() const { return coef_; }

  double value(std::span<const double> u) const;
  //! Energy with its gradient in u written to grad (sized unknowns()).
  double operator()(std::span<const double> u, std::span<double> grad) const;

  //! Inverse of normalization * |cell| * D^T D on nodes away from every block_cells-th line.
  std::unique_ptr<LaplacePreconditioner> preconditioner(std::array<int, 2> block_cells) const;
  std::unique_ptr<LaplacePreconditioner> preconditioner() const;

  //! Fixed-node mask (per unknown) for the nodes on every block_cells-th grid line.
  std::vector<std::uint8_t> skeleton_mask(std::array<int, 2> block_cells) const;

 private:
  double accumulate(std::span<const double> u, double* grad) const;

  const IntegrandSpec* spec_;
  Grid grid_;
  bool periodic_;
  std::vector<double> offset_;
  double normalization_;
  int N_;
  int d_;
  std::array<std::size_t, 2> nodes_per_axis_{1, 1};
  std::size_t nodes_ = 0;
  std::vector<double> coef_;
};

}  // namespace uhom
