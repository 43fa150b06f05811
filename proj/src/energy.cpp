#include "uhom/energy.hpp"

#include <cmath>

#include "uhom/errors.hpp"

namespace uhom {

GradientEnergy::GradientEnergy(const IntegrandSpec& spec, Grid grid, bool periodic,
                               std::vector<double> offset, double y_scale, double normalization)
    : spec_(&spec), grid_(std::move(grid)), periodic_(periodic), offset_(std::move(offset)),
      normalization_(normalization), N_(spec.space_dim()), d_(spec.target_dim()) {
  if (grid_.dim() != N_) throw ContractError("energy grid dimension differs from the integrand's N");
  if (offset_.empty()) offset_.assign(spec.xi_size(), 0.0);
  if (static_cast<int>(offset_.size()) != spec.xi_size()) {
    throw ContractError("energy offset has the wrong number of entries");
  }
  nodes_ = 1;
  for (int k = 0; k < N_; ++k) {
    nodes_per_axis_[k] = static_cast<std::size_t>(grid_.resolution(k) + (periodic_ ? 0 : 1));
    nodes_ *= nodes_per_axis_[k];
  }
  coef_.resize(grid_.cell_count());
  const int n1 = N_ > 1 ? grid_.resolution(1) : 1;
  for (int i = 0; i < grid_.resolution(0); ++i) {
    for (int j = 0; j < n1; ++j) {
      Point y = grid_.cell_center({i, j});
      for (int k = 0; k < N_; ++k) y[k] *= y_scale;
      coef_[static_cast<std::size_t>(i) * n1 + j] = spec.coefficient_at(y);
    }
  }
}

double GradientEnergy::value(std::span<const double> u) const {
  if (u.size() != unknowns()) throw ContractError("energy argument has the wrong size");
  return accumulate(u, nullptr);
}

double GradientEnergy::operator()(std::span<const double> u, std::span<double> grad) const {
  if (u.size() != unknowns() || grad.size() != unknowns()) {
    throw ContractError("energy argument has the wrong size");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  return accumulate(u, grad.data());
}

double GradientEnergy::accumulate(std::span<const double> u, double* grad) const {
  const Potential& W = spec_->potential();
  const int n0 = grid_.resolution(0);
  const int n1 = N_ > 1 ? grid_.resolution(1) : 1;
  const std::size_t m1 = nodes_per_axis_[1];
  const double weight = normalization_ * grid_.cell_volume();
  const std::array<double, 2> inv_h{1.0 / grid_.spacing(0), N_ > 1 ? 1.0 / grid_.spacing(1) : 1.0};
  const int m = N_ * d_;
  double xi[4];
  double g[4];
  std::size_t nb[2];
  double total = 0.0;
  for (int i = 0; i < n0; ++i) {
    const std::size_t ip = periodic_ && i + 1 == n0 ? 0 : static_cast<std::size_t>(i + 1);
    for (int j = 0; j < n1; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * m1 + static_cast<std::size_t>(j);
      nb[0] = ip * m1 + static_cast<std::size_t>(j);
      if (N_ > 1) {
        const std::size_t jp = periodic_ && j + 1 == n1 ? 0 : static_cast<std::size_t>(j + 1);
        nb[1] = static_cast<std::size_t>(i) * m1 + jp;
      }
      for (int c = 0; c < d_; ++c) {
        const double base = u[p * d_ + c];
        for (int k = 0; k < N_; ++k) {
          xi[c * N_ + k] = offset_[c * N_ + k] + (u[nb[k] * d_ + c] - base) * inv_h[k];
        }
      }
      const double a = coef_[static_cast<std::size_t>(i) * n1 + j];
      const std::span<const double> xs(xi, m);
      total += a * W.value(xs);
      if (grad) {
        W.gradient(xs, std::span<double>(g, m));
        for (int c = 0; c < d_; ++c) {
          for (int k = 0; k < N_; ++k) {
            const double w = weight * a * g[c * N_ + k] * inv_h[k];
            grad[nb[k] * d_ + c] += w;
            grad[p * d_ + c] -= w;
          }
        }
      }
    }
  }
  return weight * total;
}

std::unique_ptr<LaplacePreconditioner> GradientEnergy::preconditioner(
    std::array<int, 2> block_cells) const {
  const double scale = normalization_ * grid_.cell_volume();
  const std::array<int, 2> dims{grid_.resolution(0), N_ > 1 ? grid_.resolution(1) : 1};
  const std::array<double, 2> h{grid_.spacing(0), N_ > 1 ? grid_.spacing(1) : 1.0};
  if (periodic_) return LaplacePreconditioner::periodic(N_, dims, h, d_, scale);
  return LaplacePreconditioner::blocks(N_, dims, block_cells, h, d_, scale);
}

std::unique_ptr<LaplacePreconditioner> GradientEnergy::preconditioner() const {
  return preconditioner({grid_.resolution(0), N_ > 1 ? grid_.resolution(1) : 1});
}

std::vector<std::uint8_t> GradientEnergy::skeleton_mask(std::array<int, 2> block_cells) const {
  std::vector<std::uint8_t> mask(unknowns(), 0);
  if (periodic_) return mask;
  const std::size_t m1 = nodes_per_axis_[1];
  for (std::size_t i = 0; i < nodes_per_axis_[0]; ++i) {
    for (std::size_t j = 0; j < m1; ++j) {
      bool on = i % static_cast<std::size_t>(block_cells[0]) == 0;
      if (N_ > 1) on = on || j % static_cast<std::size_t>(block_cells[1]) == 0;
      if (on) {
        for (int c = 0; c < d_; ++c) mask[(i * m1 + j) * d_ + c] = 1;
      }
    }
  }
  return mask;
}

}  // namespace uhom
