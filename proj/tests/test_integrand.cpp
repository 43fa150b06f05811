#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uhom/errors.hpp"
#include "uhom/integrand.hpp"

using namespace uhom;

namespace {

// Lower hull value at x by brute force over all sample pairs bracketing x.
double brute_hull(const std::vector<double>& xs, const std::vector<double>& ws, double x) {
  double best = INFINITY;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == x) best = std::min(best, ws[i]);
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i] <= x && x <= xs[j]) {
        const double l = (x - xs[i]) / (xs[j] - xs[i]);
        best = std::min(best, (1 - l) * ws[i] + l * ws[j]);
      }
    }
  }
  return best;
}

IntegrandSpec two_phase() {
  return IntegrandSpec::separable(Coefficient::piecewise(0, {0.5}, {1.0, 4.0}), Potential::power(2.0),
                                  GrowthMetadata{YoungFunction::power(2.0), 4.0, 0.0});
}

}  // namespace

TEST(Integrand, CoefficientKinds) {
  const Coefficient pw = Coefficient::piecewise(0, {0.5}, {1.0, 4.0});
  EXPECT_EQ(pw(Point{0.25, 0.0}), 1.0);
  EXPECT_EQ(pw(Point{0.75, 0.0}), 4.0);
  EXPECT_EQ(pw(Point{1.25, 0.0}), 1.0);  // periodic
  const Coefficient tr = Coefficient::trig(2.0, 0.5, {1, 0});
  EXPECT_NEAR(tr(Point{0.25, 0.0}), 2.5, 1e-15);
  EXPECT_NEAR(tr.minimum(), 1.5, 1e-15);
  // a(y) must stay bounded below by a positive constant.
  EXPECT_THROW(IntegrandSpec::separable(Coefficient::trig(1.0, 2.0, {1, 0}), Potential::power(2.0)), ContractError);
}

TEST(Integrand, GradientMatchesCentralDifference) {
  const IntegrandSpec q = IntegrandSpec::separable(Coefficient::constant(2.0),
                                                   Potential::quadratic({2.0, 0.5, 0.5, 1.0}, 2),
                                                   GrowthMetadata{}, 2, 1);
  const IntegrandSpec dw = IntegrandSpec::constant_in_y(Potential::double_well(), GrowthMetadata{}, 2, 1);
  for (const IntegrandSpec* s : {&q, &dw}) {
    const std::vector<double> xi{0.7, -1.3};
    std::vector<double> g(2);
    s->grad_xi(Point{0.3, 0.6}, xi, g);
    const auto fd = grad_xi_central_difference(*s, Point{0.3, 0.6}, xi);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(g[k], fd[k], 1e-6 * (1 + std::fabs(g[k])));
  }
}

TEST(Integrand, QuadraticRejectsIndefinite) {
  EXPECT_THROW(Potential::quadratic({1.0, 2.0, 2.0, 1.0}, 2), ContractError);
}

TEST(Integrand, GrowthCheckAcceptsTwoPhaseAndRefusesDoubleWell) {
  const IntegrandSpec s = two_phase();
  const GrowthReport r = growth_check(s, s.growth().B, default_growth_samples(s));
  EXPECT_TRUE(r.accepted());
  EXPECT_NEAR(r.fitted_M, 4.0, 1e-12);

  const IntegrandSpec dw = IntegrandSpec::constant_in_y(Potential::double_well(),
                                                        GrowthMetadata{YoungFunction::power(2.0), 4.0, 1.0});
  const GrowthReport d = growth_check(dw, dw.growth().B, default_growth_samples(dw));
  EXPECT_FALSE(d.lower_ok);
  // The worst lower margin sits at a well: W(1) = 0 against B(1) = 1.
  EXPECT_NEAR(d.worst_lower_margin, -1.0, 1e-12);
  ASSERT_EQ(d.worst_lower_xi.size(), 1u);
  EXPECT_NEAR(std::fabs(d.worst_lower_xi[0]), 1.0, 1e-12);
}

TEST(Integrand, ConvexEnvelopeMatchesBruteForceHull) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> coeff(6);
  for (double& c : coeff) c = u(rng);
  const auto W = [&](double x) {
    double s = x * x;
    for (int k = 0; k < 6; ++k) s += coeff[k] * std::sin((k + 1) * x);
    return s;
  };
  const int n = 81;
  const ConvexEnvelope1d env = convex_envelope_1d(W, -2.0, 2.0, n);
  std::vector<double> xs, ws;
  for (int i = 0; i < n; ++i) {
    xs.push_back(-2.0 + 4.0 * i / (n - 1));
    ws.push_back(W(xs.back()));
  }
  for (double x = -2.0; x <= 2.0; x += 0.0137) {
    EXPECT_NEAR(env.hull_value(x), brute_hull(xs, ws, x), 1e-12) << x;
  }
}

TEST(Integrand, DoubleWellEnvelopeIsClosedForm) {
  // Q((x^2 - 1)^2) = 0 on [-1, 1] and W outside.
  const ConvexEnvelope1d env = convex_envelope_1d(Potential::double_well(), -3.0, 3.0, 601);
  for (double x : {-2.5, -1.5, -1.0, -0.5, 0.0, 0.3, 1.0, 1.2, 2.9}) {
    const double exact = std::fabs(x) <= 1.0 ? 0.0 : (x * x - 1) * (x * x - 1);
    EXPECT_NEAR(env(x), exact, 1e-12) << x;
  }
}

TEST(Integrand, ConvexEnvelopeRejectsBadInput) {
  EXPECT_THROW(convex_envelope_1d([](double) { return NAN; }, 0.0, 1.0, 5), DataError);
  EXPECT_THROW(convex_envelope_1d([](double x) { return x; }, 1.0, 0.0, 5), ContractError);
}
