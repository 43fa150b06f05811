#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uhom/field.hpp"
#include "uhom/young.hpp"

namespace uhom {

//! Y-periodic coefficient a(y) of a separable integrand.
class Coefficient {
 public:
  enum class Kind { Constant, Piecewise, Trig, Sampled };

  static Coefficient constant(double value);
  //! Cellwise constant along `axis`: values[i] on [breaks[i-1], breaks[i]) of the unit period.
  static Coefficient piecewise(int axis, std::vector<double> breaks, std::vector<double> values);
  //! mean + amplitude * sin(2 pi wave . y).
  static Coefficient trig(double mean, double amplitude, std::array<int, 2> wave);
  //! Cellwise constant on a resolution^dim grid over Y (row-major).
  static Coefficient sampled(int dim, int resolution, std::vector<double> values);

  Kind kind() const { return kind_; }
  double operator()(const Point& y) const;
  double minimum() const;
  double maximum() const;

  int axis() const { return axis_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double mean_value() const { return mean_; }
  double amplitude() const { return amplitude_; }
  std::array<int, 2> wave() const { return wave_; }
  int dim() const { return dim_; }
  int resolution() const { return resolution_; }

 private:
  Kind kind_ = Kind::Constant;
  int axis_ = 0;
  int dim_ = 1;
  int resolution_ = 1;
  std::vector<double> breaks_;
  std::vector<double> values_{1.0};
  double mean_ = 1.0;
  double amplitude_ = 0.0;
  std::array<int, 2> wave_{1, 0};
};

class ConvexEnvelope1d;

//! The xi-dependence W of an integrand; xi is a flattened d x N matrix (row c, column k).
class Potential {
 public:
  enum class Kind { Power, DoubleWell, Quadratic, Envelope };

  //! |xi|^p, p > 1.
  static Potential power(double p);
  //! (|xi|^2 - 1)^2.
  static Potential double_well();
  //! xi^T A xi for a symmetric positive-definite n x n matrix (row-major).
  static Potential quadratic(std::vector<double> matrix, int n);
  //! Scalar convex envelope (Qf in d = N = 1).
  static Potential envelope(std::shared_ptr<const ConvexEnvelope1d> env);

  Kind kind() const { return kind_; }
  double exponent() const { return p_; }
  const std::vector<double>& matrix() const { return matrix_; }
  int matrix_size() const { return n_; }
  const ConvexEnvelope1d* envelope_ptr() const { return env_.get(); }

  double value(std::span<const double> xi) const;
  void gradient(std::span<const double> xi, std::span<double> out) const;
  //! A convex function <= W (W itself when W is convex; the radial envelope for DoubleWell).
  double convex_minorant(std::span<const double> xi) const;
  bool is_convex() const { return kind_ != Kind::DoubleWell; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Power;
  double p_ = 2.0;
  int n_ = 0;
  std::vector<double> matrix_;
  std::shared_ptr<const ConvexEnvelope1d> env_;
};

//! Declared growth data for B(|xi|) <= f(y, xi) <= a_bound + M B(|xi|).
struct GrowthMetadata {
  YoungFunction B = YoungFunction::power(2.0);
  double M = 1.0;
  double a_bound = 0.0;
};

enum class IntegrandForm { Separable, ConstantInY };

/*!
 * Periodic energy density f(y, xi): a(y) W(xi) (Separable) or W(xi) (ConstantInY).
 *
 * Separable coefficients must stay bounded below by a positive constant on Y.
 */
class IntegrandSpec {
 public:
  IntegrandSpec(IntegrandForm form, Coefficient a, Potential W, GrowthMetadata growth, int N,
                int d);
  static IntegrandSpec separable(Coefficient a, Potential W, GrowthMetadata growth = {},
                                 int N = 1, int d = 1);
  static IntegrandSpec constant_in_y(Potential W, GrowthMetadata growth = {}, int N = 1,
                                     int d = 1);

  IntegrandForm form() const { return form_; }
  const Coefficient& coefficient() const { return a_; }
  const Potential& potential() const { return W_; }
  const GrowthMetadata& growth() const { return growth_; }
  int space_dim() const { return N_; }
  int target_dim() const { return d_; }
  int xi_size() const { return N_ * d_; }

  //! a(y) reduced mod Y; 1 for ConstantInY.
  double coefficient_at(const Point& y) const;
  double coefficient_min() const;
  double coefficient_max() const;

  double evaluate(const Point& y, std::span<const double> xi) const;
  void grad_xi(const Point& y, std::span<const double> xi, std::span<double> out) const;

  //! Same integrand with W replaced.
  IntegrandSpec with_potential(Potential W) const;

 private:
  void check_xi(std::span<const double> xi) const;

  IntegrandForm form_;
  Coefficient a_;
  Potential W_;
  GrowthMetadata growth_;
  int N_;
  int d_;
};

double frobenius_norm(std::span<const double> xi);

//! Central differences with step 1e-6 (1 + |xi|).
std::vector<double> grad_xi_central_difference(const IntegrandSpec& spec, const Point& y,
                                               std::span<const double> xi);

struct GrowthSamples {
  std::vector<Point> y;
  std::vector<std::vector<double>> xi;
};
//! Cell centres of a y_resolution^N grid over Y, xi on a tensor grid covering [-radius, radius]^{dN}.
GrowthSamples default_growth_samples(const IntegrandSpec& spec, double radius = 10.0,
                                     int y_resolution = 16, int xi_per_axis = 41);

struct GrowthReport {
  bool lower_ok = false;
  bool upper_ok = false;
  double worst_lower_margin = 0.0;  // min f - B(|xi|)
  double worst_upper_margin = 0.0;  // min a_bound + M B(|xi|) - f with the declared constants
  std::vector<double> worst_lower_xi;
  double fitted_a_bound = 0.0;
  double fitted_M = 0.0;
  bool accepted() const { return lower_ok && upper_ok; }
};

/*!
 * Pointwise check of B(|xi|) <= f(y, xi) <= a_bound + M B(|xi|) on the samples.
 *
 * The fitted constants are the smallest a_bound (sup_y f(y, 0)) and then the
 * smallest M that make the upper bound hold on the sample set.
 */
GrowthReport growth_check(const IntegrandSpec& spec, const YoungFunction& B,
                          const GrowthSamples& samples);

//! Fitted C in |f(y,x1) - f(y,x2)| <= C (1 + b(1 + |x1| + |x2|)) |x1 - x2| over sample pairs.
double lipschitz_diagnostic(const IntegrandSpec& spec, const GrowthSamples& samples);

/*!
 * Lower convex hull of n equispaced samples of a scalar W on [lo, hi].
 *
 * Evaluation is linear along hull segments that bridge skipped samples. Segments
 * between neighbouring samples are contact intervals; there, and outside [lo, hi],
 * the source W is used when it was supplied, so the envelope equals W on its
 * contact set.
 */
class ConvexEnvelope1d {
 public:
  ConvexEnvelope1d(std::vector<double> xs, std::vector<double> ws, std::vector<std::size_t> hull,
                   std::function<double(double)> source, std::function<double(double)> source_slope);

  double operator()(double xi) const;
  double slope(double xi) const;
  //! Piecewise-linear hull interpolant (no source substitution).
  double hull_value(double xi) const;

  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  const std::vector<double>& sample_x() const { return xs_; }
  const std::vector<double>& sample_w() const { return ws_; }
  const std::vector<std::size_t>& hull() const { return hull_; }
  bool has_source() const { return static_cast<bool>(source_); }

 private:
  std::size_t segment(double xi) const;

  std::vector<double> xs_;
  std::vector<double> ws_;
  std::vector<std::size_t> hull_;
  std::function<double(double)> source_;
  std::function<double(double)> source_slope_;
};

//! Hull of raw samples; data error on non-finite values. n >= 3, lo < hi.
ConvexEnvelope1d convex_envelope_1d(const std::function<double(double)>& W, double lo, double hi,
                                    int n);
//! Hull of a scalar potential, keeping W for contact-set evaluation.
ConvexEnvelope1d convex_envelope_1d(const Potential& W, double lo, double hi, int n);

}  // namespace uhom
