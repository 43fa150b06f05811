#include "uhom/optimize.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include "uhom/errors.hpp"

namespace uhom {

namespace {

// FFTW's planner is not reentrant; execution with fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double laplace_symbol(int k, int n, double h, bool periodic) {
  const double angle = periodic ? 2.0 * std::numbers::pi * k / n : std::numbers::pi * (k + 1) / (n + 1);
  return (2.0 - 2.0 * std::cos(angle)) / (h * h);
}

}  // namespace

struct LaplacePreconditioner::Impl {
  int dim = 1;
  bool periodic = false;
  std::array<int, 2> dims{1, 1};
  std::array<int, 2> block{1, 1};
  int components = 1;
  // Sizes of the transformed array (block interior or periodic grid).
  std::array<int, 2> m{1, 1};
  std::vector<double> inv_symbol;  // already includes scale and FFT normalization
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  std::size_t nodes_per_axis(int k) const {
    if (k >= dim) return 1;
    return periodic ? static_cast<std::size_t>(dims[k]) : static_cast<std::size_t>(dims[k] + 1);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

LaplacePreconditioner::LaplacePreconditioner(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
LaplacePreconditioner::~LaplacePreconditioner() = default;

std::unique_ptr<LaplacePreconditioner> LaplacePreconditioner::blocks(
    int dim, std::array<int, 2> dims, std::array<int, 2> block_cells, std::array<double, 2> spacing,
    int components, double scale) {
  if (dim < 1 || dim > 2 || components < 1 || !(scale > 0.0)) {
    throw ContractError("invalid preconditioner layout");
  }
  auto impl = std::make_unique<Impl>();
  impl->dim = dim;
  impl->dims = dims;
  impl->block = block_cells;
  impl->components = components;
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) {
    if (block_cells[k] < 1 || dims[k] % block_cells[k] != 0) {
      throw ContractError("preconditioner blocks must tile the grid");
    }
    impl->m[k] = block_cells[k] - 1;
    total *= static_cast<std::size_t>(std::max(impl->m[k], 0));
  }
  if (total > 0) {
    double norm = 1.0;
    for (int k = 0; k < dim; ++k) norm *= 2.0 * (impl->m[k] + 1);
    impl->inv_symbol.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      double lam = 0.0;
      std::size_t r = i;
      for (int k = dim - 1; k >= 0; --k) {
        const int idx = static_cast<int>(r % impl->m[k]);
        r /= impl->m[k];
        lam += laplace_symbol(idx, impl->m[k], spacing[k], false);
      }
      impl->inv_symbol[i] = 1.0 / (scale * lam * norm);
    }
    std::vector<double> buf(total);
    fftw_r2r_kind kinds[2] = {FFTW_RODFT00, FFTW_RODFT00};
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl->forward = fftw_plan_r2r(dim, impl->m.data(), buf.data(), buf.data(), kinds,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  return std::unique_ptr<LaplacePreconditioner>(new LaplacePreconditioner(std::move(impl)));
}

std::unique_ptr<LaplacePreconditioner> LaplacePreconditioner::periodic(
    int dim, std::array<int, 2> dims, std::array<double, 2> spacing, int components, double scale) {
  if (dim < 1 || dim > 2 || components < 1 || !(scale > 0.0)) {
    throw ContractError("invalid preconditioner layout");
  }
  auto impl = std::make_unique<Impl>();
  impl->dim = dim;
  impl->periodic = true;
  impl->dims = dims;
  impl->components = components;
  impl->m = {dims[0], dim > 1 ? dims[1] : 1};
  // r2c keeps the last axis halved.
  const int last = impl->m[dim - 1] / 2 + 1;
  const std::size_t spectral = (dim == 1 ? 1 : static_cast<std::size_t>(impl->m[0])) * last;
  double norm = 1.0;
  for (int k = 0; k < dim; ++k) norm *= impl->m[k];
  impl->inv_symbol.resize(spectral);
  for (std::size_t i = 0; i < spectral; ++i) {
    const int kl = static_cast<int>(i % last);
    const int k0 = static_cast<int>(i / last);
    double lam = laplace_symbol(kl, impl->m[dim - 1], spacing[dim - 1], true);
    if (dim == 2) lam += laplace_symbol(k0, impl->m[0], spacing[0], true);
    impl->inv_symbol[i] = lam > 0.0 ? 1.0 / (scale * lam * norm) : 0.0;
  }
  std::vector<double> real(static_cast<std::size_t>(norm));
  std::vector<std::complex<double>> cplx(spectral);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl->forward = fftw_plan_dft_r2c(dim, impl->m.data(), real.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl->backward = fftw_plan_dft_c2r(dim, impl->m.data(), c, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  return std::unique_ptr<LaplacePreconditioner>(new LaplacePreconditioner(std::move(impl)));
}

void LaplacePreconditioner::apply(std::span<const double> g, std::span<double> out) const {
  const Impl& p = *impl_;
  const std::size_t n0 = p.nodes_per_axis(0);
  const std::size_t n1 = p.nodes_per_axis(1);
  const int C = p.components;
  if (g.size() != n0 * n1 * C || out.size() != g.size()) {
    throw ContractError("preconditioner input has the wrong size");
  }
  std::fill(out.begin(), out.end(), 0.0);

  if (p.periodic) {
    const std::size_t total = n0 * n1;
    std::vector<double> real(total);
    std::vector<std::complex<double>> cplx(p.inv_symbol.size());
    auto* cp = reinterpret_cast<fftw_complex*>(cplx.data());
    for (int c = 0; c < C; ++c) {
      for (std::size_t i = 0; i < total; ++i) real[i] = g[i * C + c];
      fftw_execute_dft_r2c(p.forward, real.data(), cp);
      for (std::size_t i = 0; i < cplx.size(); ++i) cplx[i] *= p.inv_symbol[i];
      fftw_execute_dft_c2r(p.backward, cp, real.data());
      for (std::size_t i = 0; i < total; ++i) out[i * C + c] = real[i];
    }
    return;
  }

  if (p.inv_symbol.empty()) return;
  const int m0 = p.m[0];
  const int m1 = p.dim > 1 ? p.m[1] : 1;
  const int blocks0 = p.dims[0] / p.block[0];
  const int blocks1 = p.dim > 1 ? p.dims[1] / p.block[1] : 1;
  std::vector<double> buf(p.inv_symbol.size());
  for (int b0 = 0; b0 < blocks0; ++b0) {
    for (int b1 = 0; b1 < blocks1; ++b1) {
      for (int c = 0; c < C; ++c) {
        auto node = [&](int i, int j) {
          const std::size_t i0 = static_cast<std::size_t>(b0 * p.block[0] + 1 + i);
          const std::size_t j0 = p.dim > 1 ? static_cast<std::size_t>(b1 * p.block[1] + 1 + j) : 0;
          return (i0 * n1 + j0) * C + c;
        };
        for (int i = 0; i < m0; ++i)
          for (int j = 0; j < m1; ++j) buf[static_cast<std::size_t>(i) * m1 + j] = g[node(i, j)];
        fftw_execute_r2r(p.forward, buf.data(), buf.data());
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= p.inv_symbol[i];
        fftw_execute_r2r(p.forward, buf.data(), buf.data());
        for (int i = 0; i < m0; ++i)
          for (int j = 0; j < m1; ++j) out[node(i, j)] = buf[static_cast<std::size_t>(i) * m1 + j];
      }
    }
  }
}

// ---------------------------------------------------------------------------

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0,
                           std::span<const std::uint8_t> fixed, const LbfgsOptions& opt,
                           const Preconditioner* precond) {
  const std::size_t n = x0.size();
  if (!fixed.empty() && fixed.size() != n) throw ContractError("fixed mask has the wrong size");
  auto is_fixed = [&](std::size_t i) { return !fixed.empty() && fixed[i] != 0; };
  auto mask = [&](std::vector<double>& v) {
    if (fixed.empty()) return;
    for (std::size_t i = 0; i < n; ++i) if (fixed[i]) v[i] = 0.0;
  };
  auto apply_p = [&](const std::vector<double>& g, std::vector<double>& out) {
    if (precond) {
      precond->apply(g, out);
      mask(out);
    } else {
      out = g;
    }
  };

  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n), pg(n);
  res.value = f(res.x, g);
  mask(g);
  if (!std::isfinite(res.value)) {
    res.finite = false;
    return res;
  }
  apply_p(g, pg);
  res.grad_norm = std::sqrt(std::max(0.0, dot(g, pg)));

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  double gamma = 1.0;
  std::vector<double> d(n), q(n), r(n), xn(n), gn(n), py(n);
  int stall = 0;

  for (res.iterations = 0; res.iterations < opt.max_iters; ++res.iterations) {
    if (res.grad_norm <= opt.grad_tol) break;

    // Two-loop recursion with H0 = gamma P.
    q = g;
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * dot(memory[k].s, q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * memory[k].y[i];
    }
    apply_p(q, r);
    for (double& v : r) v *= gamma;
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, r);
      for (std::size_t i = 0; i < n; ++i) r[i] += memory[k].s[i] * (alpha[k] - beta);
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = is_fixed(i) ? 0.0 : -r[i];
    double gd = dot(g, d);
    if (!(gd < 0.0)) {
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
      gd = dot(g, d);
    }

    bool accepted = false;
    double fn = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      for (int bt = 0; bt <= opt.max_backtracks; ++bt, step *= opt.backtrack) {
        for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + step * d[i];
        fn = f(xn, gn);
        if (!std::isfinite(fn)) continue;
        mask(gn);
        if (fn <= res.value + opt.armijo * step * gd) {
          accepted = true;
          break;
        }
        // Approximate sufficient decrease at round-off level.
        const double slack = 1e-13 * std::fabs(res.value) + std::numeric_limits<double>::min();
        if (fn <= res.value + slack && dot(gn, d) <= (1.0 - 2.0 * opt.armijo) * std::fabs(gd)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (memory.empty()) break;
        memory.clear();
        for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
        gd = dot(g, d);
      }
    }
    if (!accepted) break;

    Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = xn[i] - res.x[i];
      pair.y[i] = gn[i] - g[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-300) {
      apply_p(pair.y, py);
      const double ypy = dot(pair.y, py);
      if (ypy > 0.0) gamma = sy / ypy;
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (static_cast<int>(memory.size()) > opt.memory) memory.pop_front();
    }

    const double decrease = res.value - fn;
    res.x.swap(xn);
    g.swap(gn);
    res.value = fn;
    apply_p(g, pg);
    res.grad_norm = std::sqrt(std::max(0.0, dot(g, pg)));
    stall = decrease <= 1e-15 * std::fabs(res.value) ? stall + 1 : 0;
    if (stall >= 20) {
      ++res.iterations;
      break;
    }
  }
  res.converged = res.grad_norm <= opt.grad_tol;
  return res;
}

}  // namespace uhom
