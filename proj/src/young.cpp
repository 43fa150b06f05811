#include "uhom/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "uhom/errors.hpp"

namespace uhom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_argument(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    std::ostringstream os;
    os << "Young function argument must be finite and nonnegative, got " << t;
    throw DomainError(os.str());
  }
}

// e^t - t - 1 without cancellation near 0.
double exp_minus_linear_value(double t) {
  if (t < 1e-3) {
    return t * t * (0.5 + t * (1.0 / 6.0 + t * (1.0 / 24.0 + t / 120.0)));
  }
  return std::expm1(t) - t;
}

}  // namespace

const char* to_string(YoungKind kind) {
  switch (kind) {
    case YoungKind::Power: return "power";
    case YoungKind::PowerLog: return "power_log";
    case YoungKind::ExpMinusLinear: return "exp_minus_linear";
    case YoungKind::SampledDensity: return "sampled_density";
  }
  return "power";
}

YoungKind young_kind_from_string(const std::string& name) {
  if (name == "power" || name == "Power") return YoungKind::Power;
  if (name == "power_log" || name == "PowerLog") return YoungKind::PowerLog;
  if (name == "exp_minus_linear" || name == "ExpMinusLinear") return YoungKind::ExpMinusLinear;
  if (name == "sampled_density" || name == "SampledDensity") return YoungKind::SampledDensity;
  throw ConfigError("unknown Young function kind '" + name + "'");
}

YoungFunction::YoungFunction(YoungKind kind, std::vector<double> params,
                             std::shared_ptr<const Table> table)
    : kind_(kind), params_(std::move(params)), table_(std::move(table)) {}

YoungFunction YoungFunction::power(double p, double scale) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("Power Young function needs p > 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("Power scale must be positive");
  return YoungFunction(YoungKind::Power, {p, scale}, nullptr);
}

YoungFunction YoungFunction::power_log(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("PowerLog Young function needs p >= 1");
  return YoungFunction(YoungKind::PowerLog, {p}, nullptr);
}

YoungFunction YoungFunction::exp_minus_linear() {
  return YoungFunction(YoungKind::ExpMinusLinear, {}, nullptr);
}

YoungFunction YoungFunction::sampled_density(std::vector<double> knots,
                                             std::vector<double> density) {
  if (knots.size() != density.size() || knots.empty()) {
    throw DataError("sampled density needs matching, nonempty knot and density arrays");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i]) || !std::isfinite(density[i])) {
      throw DataError("sampled density contains non-finite values");
    }
    if (knots[i] < 0.0 || density[i] < 0.0) throw DataError("sampled density must be nonnegative");
    if (i > 0 && !(knots[i] > knots[i - 1])) throw DataError("knots must be strictly increasing");
    if (i > 0 && density[i] < density[i - 1]) {
      throw DataError("density must be nondecreasing (B convex)");
    }
  }
  if (knots.front() > 0.0) {
    knots.insert(knots.begin(), 0.0);
    density.insert(density.begin(), 0.0);
  }
  auto table = std::make_shared<Table>();
  table->t = std::move(knots);
  table->b = std::move(density);
  table->cumulative.assign(table->t.size(), 0.0);
  for (std::size_t i = 1; i < table->t.size(); ++i) {
    table->cumulative[i] = table->cumulative[i - 1] +
                           0.5 * (table->b[i] + table->b[i - 1]) * (table->t[i] - table->t[i - 1]);
  }
  return YoungFunction(YoungKind::SampledDensity, {}, std::move(table));
}

std::span<const double> YoungFunction::knots() const {
  if (!table_) return {};
  return table_->t;
}

std::span<const double> YoungFunction::density_samples() const {
  if (!table_) return {};
  return table_->b;
}

double YoungFunction::value(double t) const {
  check_argument(t);
  if (t == 0.0) return 0.0;
  switch (kind_) {
    case YoungKind::Power: return params_[1] * std::pow(t, params_[0]);
    case YoungKind::PowerLog: return std::pow(t, params_[0]) * std::log(std::numbers::e + t);
    case YoungKind::ExpMinusLinear: return exp_minus_linear_value(t);
    case YoungKind::SampledDensity: {
      const Table& tab = *table_;
      const std::size_t n = tab.t.size();
      std::size_t i;
      if (t >= tab.t.back()) {
        i = n - 1;
      } else {
        i = static_cast<std::size_t>(std::upper_bound(tab.t.begin(), tab.t.end(), t) -
                                     tab.t.begin()) - 1;
      }
      double slope = 0.0;
      if (i + 1 < n) {
        slope = (tab.b[i + 1] - tab.b[i]) / (tab.t[i + 1] - tab.t[i]);
      } else if (n >= 2) {
        slope = (tab.b[n - 1] - tab.b[n - 2]) / (tab.t[n - 1] - tab.t[n - 2]);
      }
      const double tau = t - tab.t[i];
      return tab.cumulative[i] + tab.b[i] * tau + 0.5 * slope * tau * tau;
    }
  }
  return 0.0;
}

double YoungFunction::density(double t) const {
  check_argument(t);
  switch (kind_) {
    case YoungKind::Power:
      return params_[1] * params_[0] * std::pow(t, params_[0] - 1.0);
    case YoungKind::PowerLog: {
      const double p = params_[0];
      const double lead = (p == 1.0) ? 1.0 : std::pow(t, p - 1.0);
      return p * lead * std::log(std::numbers::e + t) + std::pow(t, p) / (std::numbers::e + t);
    }
    case YoungKind::ExpMinusLinear: return std::expm1(t);
    case YoungKind::SampledDensity: {
      const Table& tab = *table_;
      const std::size_t n = tab.t.size();
      if (n == 1) return tab.b[0];
      std::size_t i;
      if (t >= tab.t.back()) {
        i = n - 2;
      } else {
        i = static_cast<std::size_t>(std::upper_bound(tab.t.begin(), tab.t.end(), t) -
                                     tab.t.begin()) - 1;
      }
      const double slope = (tab.b[i + 1] - tab.b[i]) / (tab.t[i + 1] - tab.t[i]);
      return tab.b[i] + slope * (t - tab.t[i]);
    }
  }
  return 0.0;
}

std::string YoungFunction::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  switch (kind_) {
    case YoungKind::Power: os << "(p=" << params_[0] << ", c=" << params_[1] << ")"; break;
    case YoungKind::PowerLog: os << "(p=" << params_[0] << ")"; break;
    case YoungKind::ExpMinusLinear: break;
    case YoungKind::SampledDensity: os << "(" << table_->t.size() << " knots)"; break;
  }
  return os.str();
}

double eval_B(const YoungFunction& B, double t) { return B.value(t); }

std::vector<double> geometric_ladder(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw ContractError("geometric ladder needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> out(n);
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(log_lo + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

YoungFunction complementary(const YoungFunction& B, std::span<const double> t_ladder,
                            const LegendreGrid& grid) {
  if (!(grid.s_min > 0.0) || !(grid.s_max > grid.s_min) || grid.points < 2) {
    throw ContractError("invalid Legendre grid");
  }
  // Superlinearity on the scan range: the density must keep growing over the last decade.
  double s_top = grid.s_max;
  while (!std::isfinite(B.density(s_top)) && s_top > grid.s_min) s_top *= 0.99;
  const double b_top = B.density(s_top);
  const double b_decade = B.density(std::max(grid.s_min, s_top / 10.0));
  if (!(b_top > b_decade * (1.0 + 1e-9))) {
    throw CertificateError("density of B stops growing on the scan range; sup s t - B(s) "
                           "does not stabilise (B not superlinear)");
  }

  // (t, b^{-1}(t)) pairs: images of the geometric s-grid, plus the ladder points
  // whose inverse is found by bisection so that they are knots themselves.
  std::vector<std::pair<double, double>> pairs;
  for (double s : geometric_ladder(grid.s_min, grid.s_max, grid.points)) {
    const double t = B.density(s);
    if (!std::isfinite(t)) break;
    pairs.emplace_back(t, s);
  }
  for (double t : t_ladder) {
    check_argument(t);
    if (t == 0.0) continue;
    if (t > b_top) {
      std::ostringstream os;
      os << "sup_s (s t - B(s)) not attained for s <= " << s_top << " at t = " << t;
      throw CertificateError(os.str());
    }
    double lo = 0.0;
    double hi = s_top;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (B.density(mid) <= t) lo = mid; else hi = mid;
    }
    pairs.emplace_back(t, lo);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<double> knots{0.0};
  std::vector<double> inverse{0.0};
  for (const auto& [t, s] : pairs) {
    if (t > knots.back()) {
      knots.push_back(t);
      inverse.push_back(std::max(s, inverse.back()));
    }
  }
  if (knots.size() < 2) throw CertificateError("complementary function has no usable samples");
  return YoungFunction::sampled_density(std::move(knots), std::move(inverse));
}

const char* to_string(GrowthCondition c) {
  return c == GrowthCondition::Delta2 ? "delta2" : "nabla2";
}

namespace {

std::vector<double> scan_ladder(double t0, double t_max, std::size_t per_decade) {
  if (!(t0 > 0.0) || !(t_max > t0)) throw ContractError("scan needs 0 < t0 < t_max");
  const double decades = std::log10(t_max / t0);
  const auto n = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(decades * static_cast<double>(per_decade))) + 1);
  return geometric_ladder(t0, t_max, n);
}

}  // namespace

GrowthCertificate delta2_certificate(const YoungFunction& B, double t0, double t_max,
                                     std::size_t samples_per_decade) {
  const std::vector<double> ts = scan_ladder(t0, t_max, samples_per_decade);
  GrowthCertificate cert;
  cert.condition = GrowthCondition::Delta2;
  cert.t0 = t0;
  cert.t_min = t0;
  cert.t_max = t_max;
  cert.samples = ts.size();

  std::vector<double> ratios(ts.size());
  bool finite = true;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double base = B.value(ts[i]);
    if (base == 0.0) throw CertificateError("degenerate Young function: B(t) = 0 at t > 0");
    ratios[i] = B.value(2.0 * ts[i]) / base;
    if (!std::isfinite(ratios[i])) finite = false;
  }
  double sup = 0.0;
  for (double r : ratios) sup = std::isfinite(r) ? std::max(sup, r) : kInf;
  cert.sup_ratio_observed = sup;

  bool diverging = !finite;
  if (finite) {
    const double last_decade = std::max(t0, t_max / 10.0);
    std::size_t first = 0;
    while (first + 1 < ts.size() && ts[first] < last_decade) ++first;
    bool monotone = true;
    for (std::size_t i = first + 1; i < ts.size(); ++i) {
      if (ratios[i] < ratios[i - 1]) monotone = false;
    }
    if (monotone && ratios.back() > 1.01 * ratios[first]) diverging = true;
  }
  cert.passed = !diverging;
  cert.constant = (B.kind() == YoungKind::Power) ? std::pow(2.0, B.params()[0]) : sup;
  return cert;
}

GrowthCertificate nabla2_certificate(const YoungFunction& B, double t0, double t_max,
                                     std::span<const double> beta_grid,
                                     std::size_t samples_per_decade) {
  const std::vector<double> ts = scan_ladder(t0, t_max, samples_per_decade);
  std::vector<double> betas(beta_grid.begin(), beta_grid.end());
  std::sort(betas.begin(), betas.end());
  for (double beta : betas) {
    if (!(beta > 1.0)) throw ContractError("nabla2 beta grid must lie in (1, inf)");
  }
  GrowthCertificate cert;
  cert.condition = GrowthCondition::Nabla2;
  cert.t0 = t0;
  cert.t_min = t0;
  cert.t_max = t_max;
  cert.samples = ts.size();
  cert.constant = std::numeric_limits<double>::quiet_NaN();
  cert.sup_ratio_observed = kInf;

  for (double beta : betas) {
    double worst = 0.0;
    for (double t : ts) {
      const double bt = B.value(t);
      // Past overflow of B(t) nothing more can be checked; the scan ends there.
      if (!std::isfinite(bt)) {
        cert.t_max = std::min(cert.t_max, t);
        break;
      }
      const double num = 2.0 * beta * bt;
      const double den = B.value(beta * t);
      double r = num / den;
      if (std::isnan(r)) r = kInf;
      worst = std::max(worst, r);
      if (worst > 1.0 + 1e-12) break;
    }
    if (worst <= 1.0 + 1e-12) {
      cert.passed = true;
      cert.constant = beta;
      cert.sup_ratio_observed = worst;
      return cert;
    }
    cert.sup_ratio_observed = std::min(cert.sup_ratio_observed, worst);
  }
  return cert;
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int k = 101; k <= 200; ++k) grid.push_back(k / 100.0);
  const std::vector<double> tail = geometric_ladder(2.0, 1e4, 120);
  grid.insert(grid.end(), tail.begin() + 1, tail.end());
  return grid;
}

YoungInvariants check_invariants(const YoungFunction& B, std::size_t points) {
  YoungInvariants inv;
  inv.zero_at_origin = B.value(0.0) == 0.0;
  std::vector<double> ts = geometric_ladder(1e-6, 1e6, points);
  std::vector<double> vs;
  for (double t : ts) {
    const double v = B.value(t);
    if (!std::isfinite(v)) break;
    vs.push_back(v);
  }
  const bool overflowed = vs.size() < ts.size();
  ts.resize(vs.size());

  inv.nondecreasing = true;
  inv.convex = true;
  double prev_slope = B.value(ts[0]) / ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (vs[i] < vs[i - 1]) inv.nondecreasing = false;
    const double slope = (vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1]);
    if (slope < prev_slope * (1.0 - 1e-9) - 1e-300) inv.convex = false;
    prev_slope = slope;
  }
  const double ratio_one = B.value(1.0);
  inv.ratio_at_min = vs.front() / ts.front();
  inv.ratio_at_max = overflowed ? kInf : vs.back() / ts.back();
  inv.sublinear_at_zero = inv.ratio_at_min <= 0.1 * ratio_one;
  inv.superlinear_at_infinity = inv.ratio_at_max >= 10.0 * ratio_one;
  return inv;
}

double modular(const YoungFunction& B, std::span<const double> magnitudes, double weight) {
  double s = 0.0;
  for (double m : magnitudes) {
    if (!std::isfinite(m)) throw DataError("modular: non-finite field value");
    s += B.value(std::fabs(m));
  }
  return s * weight;
}

double modular(const YoungFunction& B, const GridField& u) {
  return modular(B, magnitudes(u), u.grid().cell_volume());
}

double luxemburg_norm(const YoungFunction& B, std::span<const double> magnitudes, double weight,
                      double tol) {
  if (!(tol > 0.0)) throw ContractError("luxemburg_norm needs tol > 0");
  bool all_zero = true;
  for (double m : magnitudes) {
    if (!std::isfinite(m)) throw DataError("luxemburg_norm: non-finite field value");
    if (m != 0.0) all_zero = false;
  }
  if (all_zero) return 0.0;

  std::vector<double> scaled(magnitudes.size());
  auto mod_at = [&](double k) {
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = std::fabs(magnitudes[i]) / k;
    return modular(B, scaled, weight);
  };

  constexpr double kHuge = 1e300;
  double lo = 1.0;
  double hi = 1.0;
  if (mod_at(1.0) > 1.0) {
    while (mod_at(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kHuge) throw DivergenceError("Luxemburg bracket exceeded the finite range");
    }
  } else {
    while (mod_at(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1.0 / kHuge) throw DivergenceError("Luxemburg bracket collapsed to zero");
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if (mod_at(mid) > 1.0) lo = mid; else hi = mid;
  }
  const double final_mod = mod_at(hi);
  if (std::fabs(final_mod - 1.0) > tol) {
    std::ostringstream os;
    os << "Luxemburg bisection ended with modular " << final_mod << " (tol " << tol << ")";
    throw DivergenceError(os.str());
  }
  return hi;
}

double luxemburg_norm(const YoungFunction& B, const GridField& u, double tol) {
  return luxemburg_norm(B, magnitudes(u), u.grid().cell_volume(), tol);
}

}  // namespace uhom
