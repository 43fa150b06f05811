#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace uhom {

//! Value and gradient at x; the gradient is written into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/*!
 * Symmetric positive (semi)definite approximation of an inverse Hessian.
 *
 * apply(g, out) writes P g. Entries of g belonging to fixed unknowns are
 * ignored and the matching entries of out are zero.
 */
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> g, std::span<double> out) const = 0;
};

/*!
 * Inverse of the scaled discrete Laplacian -scale * sum_k D_k^T D_k on a node grid.
 *
 * Nodes sit on a dims[0] x dims[1] cell grid (dim 1 or 2) with `components`
 * interleaved values per node. Two layouts are supported:
 *   - blocks: every block_cells-th node line is fixed, the rest are free and
 *     each block interior is an independent Dirichlet problem (a single block
 *     spanning the box is the ordinary zero-boundary case). Diagonalized by DST-I.
 *   - periodic: dims nodes per axis with wrap-around, the constant mode dropped.
 *     Diagonalized by the real DFT.
 */
class LaplacePreconditioner : public Preconditioner {
 public:
  static std::unique_ptr<LaplacePreconditioner> blocks(int dim, std::array<int, 2> dims,
                                                       std::array<int, 2> block_cells,
                                                       std::array<double, 2> spacing,
                                                       int components, double scale);
  static std::unique_ptr<LaplacePreconditioner> periodic(int dim, std::array<int, 2> dims,
                                                         std::array<double, 2> spacing,
                                                         int components, double scale);
  ~LaplacePreconditioner() override;
  void apply(std::span<const double> g, std::span<double> out) const override;

  struct Impl;

 private:
  explicit LaplacePreconditioner(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

struct LbfgsOptions {
  int memory = 20;
  int max_iters = 5000;
  double grad_tol = 1e-8;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  //! sqrt(g^T P g) at x (Euclidean norm when no preconditioner).
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  //! False when a non-finite value was met at the start point.
  bool finite = true;
};

/*!
 * Limited-memory BFGS with backtracking Armijo search.
 *
 * Entries with fixed[i] != 0 never move. The initial inverse Hessian is
 * gamma * P with the usual curvature scaling gamma. Converged means
 * sqrt(g^T P g) <= grad_tol. Near round-off the sufficient-decrease test is
 * relaxed to an approximate one that also requires the directional derivative
 * to shrink, so iteration stops cleanly rather than stalling in the search.
 */
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0,
                           std::span<const std::uint8_t> fixed, const LbfgsOptions& options,
                           const Preconditioner* precond = nullptr);

}  // namespace uhom
