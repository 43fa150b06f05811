#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uhom/errors.hpp"
#include "uhom/young.hpp"

using namespace uhom;

namespace {

// sup_s (s t - B(s)) by exhaustive scan, refined around the best sample.
double brute_conjugate(const YoungFunction& B, double t) {
  double best = 0.0, arg = 0.0;
  for (int i = 1; i <= 200000; ++i) {
    const double s = 1e-4 * i;
    const double v = s * t - B.value(s);
    if (v > best) best = v, arg = s;
  }
  for (int i = -1000; i <= 1000; ++i) {
    const double s = arg + 1e-7 * i;
    if (s > 0) best = std::max(best, s * t - B.value(s));
  }
  return best;
}

}  // namespace

TEST(Young, PowerValuesAndDensity) {
  const YoungFunction B = YoungFunction::power(3.0, 0.5);
  EXPECT_DOUBLE_EQ(B.value(2.0), 4.0);
  EXPECT_DOUBLE_EQ(B.density(2.0), 6.0);
  EXPECT_EQ(B.value(0.0), 0.0);
  EXPECT_THROW(B.value(-1.0), DomainError);
}

TEST(Young, ConstructorsRejectBadParameters) {
  EXPECT_THROW(YoungFunction::power(1.0), DomainError);
  EXPECT_THROW(YoungFunction::power(2.0, -1.0), DomainError);
  EXPECT_THROW(YoungFunction::sampled_density({1.0, 0.5}, {1.0, 2.0}), DataError);
  EXPECT_THROW(YoungFunction::sampled_density({1.0, 2.0}, {2.0, 1.0}), DataError);
}

TEST(Young, SampledDensityIntegratesExactly) {
  // b(t) = t on [0, 2], so B(t) = t^2 / 2 there and the slope continues beyond.
  const YoungFunction B = YoungFunction::sampled_density({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
  EXPECT_NEAR(B.value(1.5), 1.125, 1e-14);
  EXPECT_NEAR(B.value(3.0), 4.5, 1e-13);
  EXPECT_NEAR(B.density(0.5), 0.5, 1e-15);
}

TEST(Young, InvariantsHoldForClosedForms) {
  for (const YoungFunction& B : {YoungFunction::power(1.5), YoungFunction::power_log(1.5),
                                 YoungFunction::exp_minus_linear()}) {
    const YoungInvariants inv = check_invariants(B);
    EXPECT_TRUE(inv.zero_at_origin && inv.nondecreasing && inv.convex) << B.describe();
    EXPECT_TRUE(inv.sublinear_at_zero && inv.superlinear_at_infinity) << B.describe();
  }
}

TEST(Young, ComplementaryMatchesBruteForceLegendre) {
  const std::vector<double> ts{0.5, 1.0, 2.0, 3.0};
  for (const YoungFunction& B : {YoungFunction::power(2.0), YoungFunction::power(3.0),
                                 YoungFunction::power_log(1.5), YoungFunction::exp_minus_linear()}) {
    const YoungFunction Bt = complementary(B, ts);
    for (double t : ts) {
      const double oracle = brute_conjugate(B, t);
      EXPECT_NEAR(Bt.value(t), oracle, 1e-6 * (1.0 + oracle)) << B.describe() << " t=" << t;
    }
  }
}

TEST(Young, ComplementaryDefaultGridIsExactAtKnots) {
  // Power(2): B~(t) = t^2 / 4.
  const YoungFunction Bt = complementary(YoungFunction::power(2.0));
  for (double t : {0.1, 1.0, 10.0}) EXPECT_NEAR(Bt.value(t), t * t / 4.0, 1e-6 * (1 + t * t));
}

TEST(Young, ComplementaryRefusesUnreachableLadder) {
  const double far[] = {1e9};
  EXPECT_THROW(complementary(YoungFunction::power(2.0), far), CertificateError);
}

TEST(Young, Delta2Certificates) {
  const GrowthCertificate p2 = delta2_certificate(YoungFunction::power(2.0), 1.0, 1e6);
  EXPECT_TRUE(p2.passed);
  EXPECT_DOUBLE_EQ(p2.constant, 4.0);
  EXPECT_FALSE(delta2_certificate(YoungFunction::exp_minus_linear(), 1.0, 1e6).passed);
  EXPECT_TRUE(delta2_certificate(YoungFunction::power_log(1.0), 1.0, 1e6).passed);
}

TEST(Young, Nabla2Certificates) {
  const auto betas = default_beta_grid();
  EXPECT_TRUE(nabla2_certificate(YoungFunction::power(2.0), 2.0, 1e6, betas).passed);
  // t log(e + t) is not Nabla2: 2 beta B(t) / B(beta t) tends to 2 for every beta.
  EXPECT_FALSE(nabla2_certificate(YoungFunction::power_log(1.0), 2.0, 1e6, betas).passed);
  EXPECT_TRUE(nabla2_certificate(YoungFunction::exp_minus_linear(), 2.0, 1e6, betas).passed);
}

TEST(Young, LuxemburgMatchesLpNorm) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> m(500);
  for (double& x : m) x = std::fabs(u(rng));
  const double w = 1.0 / m.size();
  for (double p : {1.5, 2.0, 3.0}) {
    double s = 0.0;
    for (double x : m) s += std::pow(x, p) * w;
    EXPECT_NEAR(luxemburg_norm(YoungFunction::power(p), m, w), std::pow(s, 1.0 / p), 1e-10 * std::pow(s, 1.0 / p));
  }
  EXPECT_EQ(luxemburg_norm(YoungFunction::power(2.0), std::vector<double>(4, 0.0), 0.25), 0.0);
}

TEST(Young, LuxemburgModularIsOneAtTheNorm) {
  const YoungFunction B = YoungFunction::power_log(1.5);
  const std::vector<double> m{0.3, 1.7, 4.2, 0.0, 2.2};
  const double k = luxemburg_norm(B, m, 0.2);
  std::vector<double> scaled;
  for (double x : m) scaled.push_back(x / k);
  EXPECT_NEAR(modular(B, scaled, 0.2), 1.0, 1e-10);
}
