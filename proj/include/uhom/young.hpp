#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uhom/field.hpp"

namespace uhom {

enum class YoungKind { Power, PowerLog, ExpMinusLinear, SampledDensity };

const char* to_string(YoungKind kind);
YoungKind young_kind_from_string(const std::string& name);

/*!
 * Convex growth profile B with density b (B(t) = int_0^t b).
 *
 * Closed-form kinds:
 *   Power(p, c)       B(t) = c t^p,            p > 1, c > 0
 *   PowerLog(p)       B(t) = t^p log(e + t),   p >= 1
 *   ExpMinusLinear    B(t) = e^t - t - 1
 *   SampledDensity    b piecewise linear through knots, B its exact integral
 *
 * Values are immutable; copies share the sampled table.
 */
class YoungFunction {
 public:
  static YoungFunction power(double p, double scale = 1.0);
  static YoungFunction power_log(double p);
  static YoungFunction exp_minus_linear();
  //! Knots strictly increasing, density nondecreasing and nonnegative. A knot at 0 is
  //! prepended (with density 0) when missing. Beyond the last knot the density
  //! continues with the slope of the final segment.
  static YoungFunction sampled_density(std::vector<double> knots, std::vector<double> density);

  YoungKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  std::span<const double> knots() const;
  std::span<const double> density_samples() const;

  //! B(t); throws DomainError for negative or non-finite t. May return +inf on overflow.
  double value(double t) const;
  //! b(t), the right derivative of B.
  double density(double t) const;

  std::string describe() const;

 private:
  struct Table {
    std::vector<double> t;
    std::vector<double> b;
    std::vector<double> cumulative;
  };

  YoungFunction(YoungKind kind, std::vector<double> params, std::shared_ptr<const Table> table);

  YoungKind kind_ = YoungKind::Power;
  std::vector<double> params_;
  std::shared_ptr<const Table> table_;
};

//! eval_B: B(t) with the domain checks of YoungFunction::value.
double eval_B(const YoungFunction& B, double t);

//! n points geometrically spaced in [lo, hi], both ends included.
std::vector<double> geometric_ladder(double lo, double hi, std::size_t n);

//! Discretisation of the Legendre sup in complementary().
struct LegendreGrid {
  double s_min = 1e-6;
  double s_max = 1e6;
  std::size_t points = 100000;
};

/*!
 * Complementary function B~(t) = sup_{s>=0} (s t - B(s)) as a SampledDensity.
 *
 * The density of B~ is the generalised inverse of b. Its knots are the images
 * b(s_i) of the geometric s-grid, so every density sample is exact; ladder
 * values become extra knots, inverted by bisection. A ladder value beyond
 * b(s_max) means the sup is not attained on the scan range and raises
 * CertificateError, as does a density that stops growing (B not superlinear).
 */
YoungFunction complementary(const YoungFunction& B, std::span<const double> t_ladder = {},
                            const LegendreGrid& grid = {});

enum class GrowthCondition { Delta2, Nabla2 };
const char* to_string(GrowthCondition c);

//! Finite-scan evidence for an asymptotic growth condition.
struct GrowthCertificate {
  GrowthCondition condition = GrowthCondition::Delta2;
  double t0 = 0.0;
  //! alpha for Delta2, smallest passing beta for Nabla2 (NaN when none passes).
  double constant = 0.0;
  //! Delta2: sup B(2t)/B(t). Nabla2: sup 2 beta B(t)/B(beta t) for the reported beta
  //! (or the best beta tried when none passes); <= 1 means the inequality holds.
  double sup_ratio_observed = 0.0;
  bool passed = false;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
};

/*!
 * Delta2 scan: alpha = sup over a geometric ladder in [t0, t_max] of B(2t)/B(t).
 *
 * Fails when a ratio is non-finite or the ratios increase monotonically across the
 * last decade of the scan by more than 1%. For Power kinds alpha is the exact 2^p.
 */
GrowthCertificate delta2_certificate(const YoungFunction& B, double t0, double t_max,
                                     std::size_t samples_per_decade = 50);

//! Nabla2 scan over beta_grid (each > 1): smallest beta with B(t) <= B(beta t)/(2 beta)
//! at every scanned t in [t0, t_max].
GrowthCertificate nabla2_certificate(const YoungFunction& B, double t0, double t_max,
                                     std::span<const double> beta_grid,
                                     std::size_t samples_per_decade = 50);

//! 1.01, 1.02, ..., 2.00 followed by a geometric ladder from 2 to 1e4.
std::vector<double> default_beta_grid();

//! Checks of the Young-function invariants on a ladder 1e-6..1e6.
struct YoungInvariants {
  bool zero_at_origin = false;
  bool nondecreasing = false;
  bool convex = false;
  bool sublinear_at_zero = false;
  bool superlinear_at_infinity = false;
  double ratio_at_min = 0.0;
  double ratio_at_max = 0.0;
};
YoungInvariants check_invariants(const YoungFunction& B, std::size_t points = 241);

//! sum_i weight * B(magnitude_i).
double modular(const YoungFunction& B, std::span<const double> magnitudes, double weight);
//! Midpoint quadrature of B(|u|) over the field's box.
double modular(const YoungFunction& B, const GridField& u);

//! Default tolerance on |modular(u / k) - 1| in luxemburg_norm.
inline constexpr double kLuxemburgTol = 1e-10;

/*!
 * Luxemburg norm inf{k > 0 : sum weight * B(m_i / k) <= 1}.
 *
 * Zero data gives 0. The bracket grows geometrically (factor 2) from k = 1 and is
 * then bisected in log-space to the resolution of double precision; DivergenceError
 * if the bracket leaves the finite range or the final modular misses 1 by more than tol.
 */
double luxemburg_norm(const YoungFunction& B, std::span<const double> magnitudes, double weight,
                      double tol = kLuxemburgTol);
double luxemburg_norm(const YoungFunction& B, const GridField& u, double tol = kLuxemburgTol);

}  // namespace uhom
