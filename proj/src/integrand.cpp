#include "uhom/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "uhom/errors.hpp"

namespace uhom {

namespace {

double wrap_unit(double y) {
  const double w = y - std::floor(y);
  return w >= 1.0 ? 0.0 : w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficient

Coefficient Coefficient::constant(double value) {
  if (!std::isfinite(value)) throw DataError("coefficient must be finite");
  Coefficient a;
  a.kind_ = Kind::Constant;
  a.values_ = {value};
  return a;
}

Coefficient Coefficient::piecewise(int axis, std::vector<double> breaks,
                                   std::vector<double> values) {
  if (axis < 0 || axis >= kMaxDim) throw ContractError("piecewise coefficient axis out of range");
  if (values.size() != breaks.size() + 1) {
    throw ContractError("piecewise coefficient needs one more value than breaks");
  }
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(breaks[i] > 0.0 && breaks[i] < 1.0) || (i > 0 && !(breaks[i] > breaks[i - 1]))) {
      throw ContractError("piecewise breaks must be strictly increasing inside (0, 1)");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("coefficient must be finite");
  }
  Coefficient a;
  a.kind_ = Kind::Piecewise;
  a.axis_ = axis;
  a.breaks_ = std::move(breaks);
  a.values_ = std::move(values);
  return a;
}

Coefficient Coefficient::trig(double mean, double amplitude, std::array<int, 2> wave) {
  if (!std::isfinite(mean) || !std::isfinite(amplitude)) throw DataError("coefficient must be finite");
  Coefficient a;
  a.kind_ = Kind::Trig;
  a.mean_ = mean;
  a.amplitude_ = amplitude;
  a.wave_ = wave;
  a.values_.clear();
  return a;
}

Coefficient Coefficient::sampled(int dim, int resolution, std::vector<double> values) {
  if (dim < 1 || dim > kMaxDim || resolution < 1) throw ContractError("invalid sampled coefficient grid");
  std::size_t expect = 1;
  for (int k = 0; k < dim; ++k) expect *= static_cast<std::size_t>(resolution);
  if (values.size() != expect) throw ContractError("sampled coefficient has the wrong length");
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("coefficient must be finite");
  }
  Coefficient a;
  a.kind_ = Kind::Sampled;
  a.dim_ = dim;
  a.resolution_ = resolution;
  a.values_ = std::move(values);
  return a;
}

double Coefficient::operator()(const Point& y) const {
  switch (kind_) {
    case Kind::Constant: return values_[0];
    case Kind::Piecewise: {
      const double t = wrap_unit(y[axis_]);
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
      return values_[static_cast<std::size_t>(it - breaks_.begin())];
    }
    case Kind::Trig: {
      const double phase = wave_[0] * wrap_unit(y[0]) + wave_[1] * wrap_unit(y[1]);
      return mean_ + amplitude_ * std::sin(2.0 * std::numbers::pi * phase);
    }
    case Kind::Sampled: {
      std::size_t idx = 0;
      for (int k = 0; k < dim_; ++k) {
        int i = static_cast<int>(std::floor(wrap_unit(y[k]) * resolution_));
        i = std::clamp(i, 0, resolution_ - 1);
        idx = idx * static_cast<std::size_t>(resolution_) + static_cast<std::size_t>(i);
      }
      return values_[idx];
    }
  }
  return 0.0;
}

double Coefficient::minimum() const {
  if (kind_ == Kind::Trig) return mean_ - std::fabs(amplitude_);
  return *std::min_element(values_.begin(), values_.end());
}

double Coefficient::maximum() const {
  if (kind_ == Kind::Trig) return mean_ + std::fabs(amplitude_);
  return *std::max_element(values_.begin(), values_.end());
}

// ---------------------------------------------------------------------------
// Potential

double frobenius_norm(std::span<const double> xi) {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return std::sqrt(s);
}

Potential Potential::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ContractError("Power potential needs p > 1");
  Potential W;
  W.kind_ = Kind::Power;
  W.p_ = p;
  return W;
}

Potential Potential::double_well() {
  Potential W;
  W.kind_ = Kind::DoubleWell;
  return W;
}

Potential Potential::quadratic(std::vector<double> matrix, int n) {
  if (n < 1 || matrix.size() != static_cast<std::size_t>(n * n)) {
    throw ContractError("quadratic potential needs an n x n matrix");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = matrix[i * n + j];
      const double b = matrix[j * n + i];
      if (!std::isfinite(a)) throw DataError("quadratic matrix must be finite");
      if (std::fabs(a - b) > 1e-12 * (1.0 + std::fabs(a))) {
        throw ContractError("quadratic matrix must be symmetric");
      }
    }
  }
  // Cholesky as the positive-definiteness test.
  std::vector<double> L(matrix.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    double diag = matrix[j * n + j];
    for (int k = 0; k < j; ++k) diag -= L[j * n + k] * L[j * n + k];
    if (!(diag > 0.0)) throw ContractError("quadratic matrix must be positive definite");
    L[j * n + j] = std::sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      double s = matrix[i * n + j];
      for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      L[i * n + j] = s / L[j * n + j];
    }
  }
  Potential W;
  W.kind_ = Kind::Quadratic;
  W.n_ = n;
  W.matrix_ = std::move(matrix);
  return W;
}

Potential Potential::envelope(std::shared_ptr<const ConvexEnvelope1d> env) {
  if (!env) throw ContractError("envelope potential needs an envelope");
  Potential W;
  W.kind_ = Kind::Envelope;
  W.env_ = std::move(env);
  return W;
}

double Potential::value(std::span<const double> xi) const {
  switch (kind_) {
    case Kind::Power: {
      const double r = frobenius_norm(xi);
      return p_ == 2.0 ? r * r : std::pow(r, p_);
    }
    case Kind::DoubleWell: {
      double s = 0.0;
      for (double v : xi) s += v * v;
      const double q = s - 1.0;
      return q * q;
    }
    case Kind::Quadratic: {
      double s = 0.0;
      for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) row += matrix_[i * n_ + j] * xi[j];
        s += xi[i] * row;
      }
      return s;
    }
    case Kind::Envelope: return (*env_)(xi[0]);
  }
  return 0.0;
}

void Potential::gradient(std::span<const double> xi, std::span<double> out) const {
  switch (kind_) {
    case Kind::Power: {
      if (p_ == 2.0) {
        for (std::size_t i = 0; i < xi.size(); ++i) out[i] = 2.0 * xi[i];
        return;
      }
      const double r = frobenius_norm(xi);
      const double scale = r == 0.0 ? 0.0 : p_ * std::pow(r, p_ - 2.0);
      for (std::size_t i = 0; i < xi.size(); ++i) out[i] = scale * xi[i];
      return;
    }
    case Kind::DoubleWell: {
      double s = 0.0;
      for (double v : xi) s += v * v;
      const double scale = 4.0 * (s - 1.0);
      for (std::size_t i = 0; i < xi.size(); ++i) out[i] = scale * xi[i];
      return;
    }
    case Kind::Quadratic: {
      for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) row += matrix_[i * n_ + j] * xi[j];
        out[i] = 2.0 * row;
      }
      return;
    }
    case Kind::Envelope: out[0] = env_->slope(xi[0]); return;
  }
}

double Potential::convex_minorant(std::span<const double> xi) const {
  if (kind_ == Kind::DoubleWell) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    const double q = std::max(0.0, s - 1.0);
    return q * q;
  }
  return value(xi);
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power: os << "power(p=" << p_ << ")"; break;
    case Kind::DoubleWell: os << "double_well"; break;
    case Kind::Quadratic: os << "quadratic(n=" << n_ << ")"; break;
    case Kind::Envelope: os << "envelope(" << env_->hull().size() << " hull vertices)"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// IntegrandSpec

IntegrandSpec::IntegrandSpec(IntegrandForm form, Coefficient a, Potential W,
                             GrowthMetadata growth, int N, int d)
    : form_(form), a_(std::move(a)), W_(std::move(W)), growth_(std::move(growth)), N_(N), d_(d) {
  if (N_ < 1 || N_ > kMaxDim || d_ < 1 || d_ > kMaxDim) {
    throw ContractError("integrand dimensions must satisfy N, d in {1, 2}");
  }
  if (W_.kind() == Potential::Kind::Quadratic && W_.matrix_size() != N_ * d_) {
    throw ContractError("quadratic potential matrix must be (dN) x (dN)");
  }
  if (W_.kind() == Potential::Kind::Envelope && (N_ != 1 || d_ != 1)) {
    throw ContractError("envelope potentials are scalar (d = N = 1)");
  }
  if (form_ == IntegrandForm::Separable) {
    if (a_.kind() == Coefficient::Kind::Piecewise && a_.axis() >= N_) {
      throw ContractError("piecewise coefficient axis exceeds the space dimension");
    }
    if (a_.kind() == Coefficient::Kind::Sampled && a_.dim() != N_) {
      throw ContractError("sampled coefficient dimension differs from N");
    }
    if (a_.kind() == Coefficient::Kind::Trig && N_ == 1 && a_.wave()[1] != 0) {
      throw ContractError("trig coefficient wave vector has a second component in 1D");
    }
    if (!(a_.minimum() > 0.0)) throw ContractError("coefficient a(y) must be bounded below by a positive constant");
  }
  if (!(growth_.M > 0.0) || !(growth_.a_bound >= 0.0)) {
    throw ContractError("growth metadata needs M > 0 and a_bound >= 0");
  }
}

IntegrandSpec IntegrandSpec::separable(Coefficient a, Potential W, GrowthMetadata growth, int N,
                                       int d) {
  return IntegrandSpec(IntegrandForm::Separable, std::move(a), std::move(W), std::move(growth), N, d);
}

IntegrandSpec IntegrandSpec::constant_in_y(Potential W, GrowthMetadata growth, int N, int d) {
  return IntegrandSpec(IntegrandForm::ConstantInY, Coefficient::constant(1.0), std::move(W),
                       std::move(growth), N, d);
}

double IntegrandSpec::coefficient_at(const Point& y) const {
  return form_ == IntegrandForm::Separable ? a_(y) : 1.0;
}

double IntegrandSpec::coefficient_min() const {
  return form_ == IntegrandForm::Separable ? a_.minimum() : 1.0;
}

double IntegrandSpec::coefficient_max() const {
  return form_ == IntegrandForm::Separable ? a_.maximum() : 1.0;
}

void IntegrandSpec::check_xi(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != xi_size()) {
    throw ContractError("xi has " + std::to_string(xi.size()) + " entries, integrand expects " +
                        std::to_string(xi_size()));
  }
}

double IntegrandSpec::evaluate(const Point& y, std::span<const double> xi) const {
  check_xi(xi);
  return coefficient_at(y) * W_.value(xi);
}

void IntegrandSpec::grad_xi(const Point& y, std::span<const double> xi, std::span<double> out) const {
  check_xi(xi);
  if (out.size() != xi.size()) throw ContractError("grad_xi output has the wrong size");
  W_.gradient(xi, out);
  const double a = coefficient_at(y);
  for (double& g : out) g *= a;
}

IntegrandSpec IntegrandSpec::with_potential(Potential W) const {
  return IntegrandSpec(form_, a_, std::move(W), growth_, N_, d_);
}

std::vector<double> grad_xi_central_difference(const IntegrandSpec& spec, const Point& y,
                                               std::span<const double> xi) {
  const double h = 1e-6 * (1.0 + frobenius_norm(xi));
  std::vector<double> probe(xi.begin(), xi.end());
  std::vector<double> out(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    probe[i] = xi[i] + h;
    const double fp = spec.evaluate(y, probe);
    probe[i] = xi[i] - h;
    const double fm = spec.evaluate(y, probe);
    probe[i] = xi[i];
    out[i] = (fp - fm) / (2.0 * h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Growth

GrowthSamples default_growth_samples(const IntegrandSpec& spec, double radius, int y_resolution,
                                     int xi_per_axis) {
  GrowthSamples s;
  const Grid yg = Grid::uniform(Box::unit(spec.space_dim()), y_resolution);
  const GridField probe = GridField::zeros(yg, 1, Boundary::Free, Centering::Cell);
  for (std::size_t p = 0; p < probe.point_count(); ++p) s.y.push_back(probe.position(p));

  const int m = spec.xi_size();
  int per_axis = xi_per_axis;
  // Keep the tensor grid near 2000 points in higher dimension; odd so 0 is included.
  if (m == 2) per_axis = std::min(per_axis, 41);
  if (m >= 3) per_axis = std::min(per_axis, 9);
  if (per_axis % 2 == 0) ++per_axis;
  std::vector<double> axis(per_axis);
  for (int i = 0; i < per_axis; ++i) axis[i] = -radius + 2.0 * radius * i / (per_axis - 1);
  axis[per_axis / 2] = 0.0;
  std::size_t total = 1;
  for (int k = 0; k < m; ++k) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t t = 0; t < total; ++t) {
    std::vector<double> xi(m);
    std::size_t r = t;
    for (int k = m - 1; k >= 0; --k) {
      xi[k] = axis[r % per_axis];
      r /= per_axis;
    }
    s.xi.push_back(std::move(xi));
  }
  return s;
}

GrowthReport growth_check(const IntegrandSpec& spec, const YoungFunction& B,
                          const GrowthSamples& samples) {
  if (samples.y.empty() || samples.xi.empty()) throw ContractError("growth_check needs samples");
  GrowthReport rep;
  rep.worst_lower_margin = std::numeric_limits<double>::infinity();
  rep.worst_upper_margin = std::numeric_limits<double>::infinity();
  bool lower_ok = true;
  bool upper_ok = true;
  const double M = spec.growth().M;
  const double a_bound = spec.growth().a_bound;

  double a_fit = 0.0;
  for (const Point& y : samples.y) {
    const std::vector<double> zero(spec.xi_size(), 0.0);
    a_fit = std::max(a_fit, spec.evaluate(y, zero));
  }
  double m_fit = 0.0;
  for (const Point& y : samples.y) {
    for (const auto& xi : samples.xi) {
      const double f = spec.evaluate(y, xi);
      const double b = B.value(frobenius_norm(xi));
      const double slack = 1e-12 * (1.0 + std::fabs(f));
      const double lower = f - b;
      if (lower < rep.worst_lower_margin) {
        rep.worst_lower_margin = lower;
        rep.worst_lower_xi = xi;
      }
      if (lower < -slack) lower_ok = false;
      const double upper = a_bound + M * b - f;
      rep.worst_upper_margin = std::min(rep.worst_upper_margin, upper);
      if (upper < -slack) upper_ok = false;
      if (b > 0.0) m_fit = std::max(m_fit, (f - a_fit) / b);
    }
  }
  rep.lower_ok = lower_ok;
  rep.upper_ok = upper_ok;
  rep.fitted_a_bound = a_fit;
  rep.fitted_M = std::max(m_fit, std::numeric_limits<double>::min());
  return rep;
}

double lipschitz_diagnostic(const IntegrandSpec& spec, const GrowthSamples& samples) {
  const YoungFunction& B = spec.growth().B;
  double C = 0.0;
  for (const Point& y : samples.y) {
    for (std::size_t i = 1; i < samples.xi.size(); ++i) {
      const auto& x1 = samples.xi[i - 1];
      const auto& x2 = samples.xi[i];
      std::vector<double> diff(x1.size());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = x1[k] - x2[k];
      const double dist = frobenius_norm(diff);
      if (dist == 0.0) continue;
      const double scale =
          (1.0 + B.density(1.0 + frobenius_norm(x1) + frobenius_norm(x2))) * dist;
      C = std::max(C, std::fabs(spec.evaluate(y, x1) - spec.evaluate(y, x2)) / scale);
    }
  }
  return C;
}

// ---------------------------------------------------------------------------
// Convex envelope

ConvexEnvelope1d::ConvexEnvelope1d(std::vector<double> xs, std::vector<double> ws,
                                   std::vector<std::size_t> hull,
                                   std::function<double(double)> source,
                                   std::function<double(double)> source_slope)
    : xs_(std::move(xs)), ws_(std::move(ws)), hull_(std::move(hull)), source_(std::move(source)),
      source_slope_(std::move(source_slope)) {}

std::size_t ConvexEnvelope1d::segment(double xi) const {
  std::size_t lo = 0;
  std::size_t hi = hull_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (xs_[hull_[mid]] <= xi) lo = mid; else hi = mid;
  }
  return lo;
}

double ConvexEnvelope1d::hull_value(double xi) const {
  const std::size_t k = segment(xi);
  const double x0 = xs_[hull_[k]];
  const double x1 = xs_[hull_[k + 1]];
  const double w0 = ws_[hull_[k]];
  const double w1 = ws_[hull_[k + 1]];
  return w0 + (w1 - w0) * (xi - x0) / (x1 - x0);
}

double ConvexEnvelope1d::operator()(double xi) const {
  if (source_ && (xi < lo() || xi > hi())) return source_(xi);
  const std::size_t k = segment(xi);
  if (source_ && hull_[k + 1] == hull_[k] + 1) return source_(xi);
  return hull_value(xi);
}

double ConvexEnvelope1d::slope(double xi) const {
  if (source_slope_ && (xi < lo() || xi > hi())) return source_slope_(xi);
  const std::size_t k = segment(xi);
  if (source_slope_ && hull_[k + 1] == hull_[k] + 1) return source_slope_(xi);
  return (ws_[hull_[k + 1]] - ws_[hull_[k]]) / (xs_[hull_[k + 1]] - xs_[hull_[k]]);
}

namespace {

ConvexEnvelope1d build_envelope(const std::function<double(double)>& W, double lo, double hi,
                                int n, std::function<double(double)> source,
                                std::function<double(double)> slope) {
  if (n < 3) throw ContractError("convex envelope needs n >= 3 samples");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ContractError("convex envelope needs a finite range lo < hi");
  }
  std::vector<double> xs(n);
  std::vector<double> ws(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    ws[i] = W(xs[i]);
    if (!std::isfinite(ws[i])) throw DataError("convex envelope: non-finite sample");
  }
  // Lower hull by a single left-to-right sweep (monotone chain).
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross =
          (xs[b] - xs[a]) * (ws[i] - ws[a]) - (ws[b] - ws[a]) * (xs[i] - xs[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  return ConvexEnvelope1d(std::move(xs), std::move(ws), std::move(hull), std::move(source),
                          std::move(slope));
}

}  // namespace

ConvexEnvelope1d convex_envelope_1d(const std::function<double(double)>& W, double lo, double hi,
                                    int n) {
  return build_envelope(W, lo, hi, n, nullptr, nullptr);
}

ConvexEnvelope1d convex_envelope_1d(const Potential& W, double lo, double hi, int n) {
  auto value = [W](double x) { return W.value(std::span<const double>(&x, 1)); };
  auto slope = [W](double x) {
    double g = 0.0;
    W.gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
  };
  return build_envelope(value, lo, hi, n, value, slope);
}

}  // namespace uhom
