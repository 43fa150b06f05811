#include "uhom/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "uhom/errors.hpp"

namespace uhom {

namespace {

constexpr double kSnap = 1e-9;

bool near_integer(double x, long& out) {
  const double r = std::round(x);
  if (std::fabs(x - r) <= kSnap * std::max(1.0, std::fabs(x))) {
    out = static_cast<long>(r);
    return true;
  }
  return false;
}

double wrap_unit(double y) { return y - std::floor(y); }

}  // namespace

std::size_t EpsilonDecomposition::cell_count() const {
  std::size_t n = 1;
  for (int k = 0; k < omega.dim; ++k) {
    n *= static_cast<std::size_t>(std::max<long>(0, xi_hi[k] - xi_lo[k]));
  }
  return n;
}

std::vector<std::array<long, kMaxDim>> EpsilonDecomposition::xi_set() const {
  std::vector<std::array<long, kMaxDim>> out;
  if (empty()) return out;
  if (omega.dim == 1) {
    for (long i = xi_lo[0]; i < xi_hi[0]; ++i) out.push_back({i, 0});
  } else {
    for (long i = xi_lo[0]; i < xi_hi[0]; ++i) {
      for (long j = xi_lo[1]; j < xi_hi[1]; ++j) out.push_back({i, j});
    }
  }
  return out;
}

double EpsilonDecomposition::measure_interior() const {
  return static_cast<double>(cell_count()) * std::pow(epsilon, omega.dim);
}

EpsilonDecomposition decompose(const Box& omega, double epsilon) {
  omega.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("decompose needs a finite epsilon > 0");
  }
  EpsilonDecomposition dec;
  dec.epsilon = epsilon;
  dec.omega = omega;
  for (int k = 0; k < omega.dim; ++k) {
    const long lo = static_cast<long>(std::ceil(omega.lower[k] / epsilon - kSnap));
    const long hi = static_cast<long>(std::floor(omega.upper[k] / epsilon + kSnap));
    dec.xi_lo[k] = lo;
    dec.xi_hi[k] = std::max(lo, hi);
  }
  const double lambda = omega.volume() - dec.measure_interior();
  dec.measure_lambda = std::fabs(lambda) <= 1e-12 * omega.volume() ? 0.0 : lambda;
  return dec;
}

std::vector<std::uint8_t> interior_mask(const EpsilonDecomposition& dec, const Grid& grid) {
  std::vector<std::uint8_t> mask(grid.cell_count(), 0);
  if (dec.empty()) return mask;
  const double tol = 1e-12 * dec.epsilon;
  const int n1 = grid.dim() == 2 ? grid.resolution(1) : 1;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    const Index idx = grid.dim() == 2
                          ? Index{static_cast<int>(c / n1), static_cast<int>(c % n1)}
                          : Index{static_cast<int>(c), 0};
    bool inside = true;
    for (int k = 0; k < grid.dim(); ++k) {
      const double a = grid.box().lower[k] + idx[k] * grid.spacing(k);
      const double b = a + grid.spacing(k);
      if (a < dec.epsilon * dec.xi_lo[k] - tol || b > dec.epsilon * dec.xi_hi[k] + tol) {
        inside = false;
      }
    }
    mask[c] = inside ? 1 : 0;
  }
  return mask;
}

Alignment alignment(const EpsilonDecomposition& dec, const Grid& grid) {
  Alignment al;
  al.aligned = true;
  for (int k = 0; k < grid.dim(); ++k) {
    long m = 0;
    long o = 0;
    if (!near_integer(dec.epsilon / grid.spacing(k), m) || m < 1) {
      al.aligned = false;
      continue;
    }
    al.cells_per_epsilon[k] = static_cast<int>(m);
    if (dec.empty()) continue;
    if (!near_integer((dec.epsilon * dec.xi_lo[k] - grid.box().lower[k]) / grid.spacing(k), o) ||
        o < 0 || o + m * (dec.xi_hi[k] - dec.xi_lo[k]) > grid.resolution(k)) {
      al.aligned = false;
      continue;
    }
    al.offset[k] = static_cast<int>(o);
  }
  return al;
}

UnfoldedField::UnfoldedField(Grid base, int y_resolution, int components, double epsilon,
                             bool aligned)
    : base_(std::move(base)),
      y_grid_(Grid::uniform(Box::unit(base_.dim()), y_resolution)),
      components_(components),
      epsilon_(epsilon),
      aligned_(aligned),
      values_(base_.cell_count() * y_grid_.cell_count() * components, 0.0) {}

std::vector<double> UnfoldedField::magnitudes() const {
  std::vector<double> out(x_count() * y_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < components_; ++c) {
      const double v = values_[i * components_ + c];
      s += v * v;
    }
    out[i] = std::sqrt(s);
  }
  return out;
}

UnfoldedField unfold(const GridField& w, const EpsilonDecomposition& dec, int y_resolution) {
  if (y_resolution < 1) throw ContractError("unfold needs y_resolution >= 1");
  if (w.dim() != dec.omega.dim) throw ContractError("unfold: field and decomposition dimensions differ");
  const GridField wc = center_values(w);
  const Grid& grid = wc.grid();
  const Alignment al = alignment(dec, grid);
  bool exact = al.aligned;
  for (int k = 0; k < grid.dim(); ++k) {
    if (al.cells_per_epsilon[k] != y_resolution) exact = false;
  }
  const int d = wc.components();
  UnfoldedField out(grid, y_resolution, d, dec.epsilon, exact);
  const std::vector<std::uint8_t> mask = interior_mask(dec, grid);
  const Grid& yg = out.y_grid();

  for (std::size_t xc = 0; xc < out.x_count(); ++xc) {
    if (!mask[xc]) continue;
    const Index xi = wc.unravel(xc);
    for (std::size_t yc = 0; yc < out.y_count(); ++yc) {
      const Index yi = yg.dim() == 2 ? Index{static_cast<int>(yc / y_resolution),
                                             static_cast<int>(yc % y_resolution)}
                                     : Index{static_cast<int>(yc), 0};
      Index src{0, 0};
      if (exact) {
        for (int k = 0; k < grid.dim(); ++k) {
          const int m = al.cells_per_epsilon[k];
          const int local = xi[k] - al.offset[k];
          src[k] = al.offset[k] + (local / m) * m + yi[k];
        }
      } else {
        const Point x = grid.cell_center(xi);
        const Point y = yg.cell_center(yi);
        for (int k = 0; k < grid.dim(); ++k) {
          const double cell = std::floor(x[k] / dec.epsilon);
          const double p = dec.epsilon * (cell + y[k]);
          int s = static_cast<int>(std::floor((p - grid.box().lower[k]) / grid.spacing(k)));
          src[k] = std::clamp(s, 0, grid.resolution(k) - 1);
        }
      }
      const std::size_t sp = wc.index(src);
      for (int c = 0; c < d; ++c) out.at(xc, yc, c) = wc.at(sp, c);
    }
  }
  return out;
}

UnfoldedField multiply(const UnfoldedField& u, const UnfoldedField& v) {
  if (!(u.base() == v.base()) || u.y_resolution() != v.y_resolution() || u.components() != 1 ||
      v.components() != 1) {
    throw ContractError("multiply: unfolded fields have different layouts");
  }
  UnfoldedField out(u.base(), u.y_resolution(), 1, u.epsilon(), u.aligned() && v.aligned());
  for (std::size_t x = 0; x < u.x_count(); ++x) {
    for (std::size_t y = 0; y < u.y_count(); ++y) out.at(x, y) = u.at(x, y) * v.at(x, y);
  }
  return out;
}

GridField multiply(const GridField& u, const GridField& v) {
  if (!(u.grid() == v.grid()) || u.centering() != v.centering() ||
      u.boundary() != v.boundary() || u.components() != 1 || v.components() != 1) {
    throw ContractError("multiply: fields have different layouts");
  }
  std::vector<double> out(u.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u.values()[i] * v.values()[i];
  return GridField(u.grid(), 1, u.boundary(), u.centering(), std::move(out));
}

ModularIdentityReport modular_identity_report(const YoungFunction& B, const GridField& w,
                                              const EpsilonDecomposition& dec) {
  const GridField wc = center_values(w);
  const Alignment al = alignment(dec, wc.grid());
  if (!al.aligned) throw ContractError("modular identity is only exact on aligned grids");
  for (int k = 1; k < wc.dim(); ++k) {
    if (al.cells_per_epsilon[k] != al.cells_per_epsilon[0]) {
      throw ContractError("modular identity needs equal eps/h on every axis");
    }
  }
  const UnfoldedField tw = unfold(wc, dec, al.cells_per_epsilon[0]);
  const std::vector<std::uint8_t> mask = interior_mask(dec, wc.grid());
  const std::vector<double> mags = magnitudes(wc);
  const double vol = wc.grid().cell_volume();
  constexpr double kMeasureY = 1.0;

  ModularIdentityReport rep;
  const std::vector<double> tw_mags = tw.magnitudes();
  rep.lhs = modular(B, tw_mags, tw.weight()) / kMeasureY;
  std::vector<double> masked(mags.size(), 0.0);
  for (std::size_t c = 0; c < mags.size(); ++c) {
    const double b = B.value(mags[c]) * vol;
    rep.rhs_full += b;
    if (mask[c]) {
      rep.rhs_interior += b;
      masked[c] = mags[c];
    } else {
      rep.lambda_gap += b;
    }
  }
  rep.defect = std::fabs(rep.lhs - rep.rhs_interior);
  rep.norm_unfolded = luxemburg_norm(B, tw_mags, tw.weight());
  rep.norm_masked = luxemburg_norm(B, masked, vol);
  rep.norm_full = luxemburg_norm(B, mags, vol);
  rep.norm_defect = std::fabs(rep.norm_unfolded - rep.norm_masked);
  rep.estimate_holds = rep.norm_unfolded <= (1.0 + kMeasureY) * rep.norm_full;
  return rep;
}

GridField mean_value(const UnfoldedField& u) {
  GridField out = GridField::zeros(u.base(), u.components(), Boundary::Free, Centering::Cell);
  const double inv = 1.0 / static_cast<double>(u.y_count());
  for (std::size_t x = 0; x < u.x_count(); ++x) {
    for (int c = 0; c < u.components(); ++c) {
      double s = 0.0;
      for (std::size_t y = 0; y < u.y_count(); ++y) s += u.at(x, y, c);
      out.at(x, c) = s * inv;
    }
  }
  return out;
}

std::vector<UciRecord> uci_defect(const YoungFunction& B,
                                  const std::vector<std::pair<double, GridField>>& sequence) {
  std::vector<UciRecord> out;
  for (const auto& [eps, w] : sequence) {
    const GridField wc = center_values(w);
    const EpsilonDecomposition dec = decompose(wc.grid().box(), eps);
    const Alignment al = alignment(dec, wc.grid());
    bool uniform = al.aligned;
    for (int k = 1; k < wc.dim(); ++k) {
      if (al.cells_per_epsilon[k] != al.cells_per_epsilon[0]) uniform = false;
    }
    const int y_res = uniform ? al.cells_per_epsilon[0] : 8;
    const UnfoldedField tw = unfold(wc, dec, y_res);
    const std::vector<std::uint8_t> mask = interior_mask(dec, wc.grid());
    const double vol = wc.grid().cell_volume();

    UciRecord rec;
    rec.epsilon = eps;
    rec.aligned = tw.aligned();
    double total = 0.0;
    double total_b = 0.0;
    for (std::size_t c = 0; c < wc.point_count(); ++c) {
      const double v = wc.at(c);
      total += v * vol;
      total_b += B.value(std::fabs(v)) * vol;
      if (!mask[c]) {
        rec.lambda_mass += std::fabs(v) * vol;
        rec.lambda_mass_orlicz += B.value(std::fabs(v)) * vol;
      }
    }
    double unfolded = 0.0;
    double unfolded_b = 0.0;
    for (std::size_t x = 0; x < tw.x_count(); ++x) {
      for (std::size_t y = 0; y < tw.y_count(); ++y) {
        unfolded += tw.at(x, y);
        unfolded_b += B.value(std::fabs(tw.at(x, y)));
      }
    }
    rec.gap = std::fabs(total - unfolded * tw.weight());
    rec.gap_orlicz = std::fabs(total_b - unfolded_b * tw.weight());
    out.push_back(rec);
  }
  return out;
}

double two_scale_pairing(const GridField& v, const TwoScaleMap& phi, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("two_scale_pairing needs epsilon > 0");
  const GridField vc = center_values(v);
  double s = 0.0;
  for (std::size_t p = 0; p < vc.point_count(); ++p) {
    const Point x = vc.position(p);
    Point y{0.0, 0.0};
    for (int k = 0; k < vc.dim(); ++k) y[k] = wrap_unit(x[k] / epsilon);
    s += vc.at(p) * phi(x, y);
  }
  return s * vc.grid().cell_volume();
}

double limit_pairing(const TwoScaleMap& v0, const TwoScaleMap& phi, const Box& omega,
                     int x_resolution, int y_resolution) {
  const Grid xg = Grid::uniform(omega, x_resolution);
  const Grid yg = Grid::uniform(Box::unit(omega.dim), y_resolution);
  const GridField xs = GridField::zeros(xg, 1, Boundary::Free, Centering::Cell);
  const GridField ys = GridField::zeros(yg, 1, Boundary::Free, Centering::Cell);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.point_count(); ++i) {
    const Point x = xs.position(i);
    for (std::size_t j = 0; j < ys.point_count(); ++j) {
      const Point y = ys.position(j);
      s += v0(x, y) * phi(x, y);
    }
  }
  return s * xg.cell_volume() * yg.cell_volume();
}

std::vector<DictionaryEntry> weak_dictionary(int dim) {
  struct Mono {
    std::string name;
    std::function<double(const Point&)> fn;
  };
  std::vector<Mono> polys;
  if (dim == 1) {
    polys = {{"1", [](const Point&) { return 1.0; }},
             {"x", [](const Point& x) { return x[0]; }},
             {"x^2", [](const Point& x) { return x[0] * x[0]; }}};
  } else {
    polys = {{"1", [](const Point&) { return 1.0; }},
             {"x1", [](const Point& x) { return x[0]; }},
             {"x2", [](const Point& x) { return x[1]; }},
             {"x1^2", [](const Point& x) { return x[0] * x[0]; }},
             {"x1*x2", [](const Point& x) { return x[0] * x[1]; }},
             {"x2^2", [](const Point& x) { return x[1] * x[1]; }}};
  }
  std::vector<Mono> trigs{{"1", [](const Point&) { return 1.0; }}};
  std::vector<std::array<int, 2>> waves;
  if (dim == 1) {
    for (int k = 1; k <= 3; ++k) waves.push_back({k, 0});
  } else {
    for (int k1 = 0; k1 <= 3; ++k1) {
      for (int k2 = -3; k2 <= 3; ++k2) {
        if (k1 == 0 && k2 <= 0) continue;
        waves.push_back({k1, k2});
      }
    }
  }
  for (const auto& kv : waves) {
    std::ostringstream tag;
    tag << "(" << kv[0];
    if (dim == 2) tag << "," << kv[1];
    tag << ")";
    const auto phase = [kv](const Point& y) {
      return 2.0 * std::numbers::pi * (kv[0] * y[0] + kv[1] * y[1]);
    };
    trigs.push_back({"cos" + tag.str(), [phase](const Point& y) { return std::cos(phase(y)); }});
    trigs.push_back({"sin" + tag.str(), [phase](const Point& y) { return std::sin(phase(y)); }});
  }
  std::vector<DictionaryEntry> out;
  for (const auto& p : polys) {
    for (const auto& t : trigs) {
      out.push_back({p.name + "*" + t.name,
                     [pf = p.fn, tf = t.fn](const Point& x, const Point& y) { return pf(x) * tf(y); }});
    }
  }
  return out;
}

}  // namespace uhom
