#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "uhom/errors.hpp"
#include "uhom/field.hpp"
#include "uhom/unfold.hpp"

using namespace uhom;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST(Field, GradientOfAffineIsExact) {
  const Grid g = Grid::uniform(Box::unit(2), 8);
  const GridField u = sample([](const Point& x) { return 3.0 * x[0] - 2.0 * x[1] + 1.0; }, g, Boundary::Free);
  const GridField d = gradient(u);
  ASSERT_EQ(d.components(), 2);
  for (std::size_t c = 0; c < d.point_count(); ++c) {
    EXPECT_NEAR(d.at(c, 0), 3.0, 1e-12);
    EXPECT_NEAR(d.at(c, 1), -2.0, 1e-12);
  }
}

TEST(Field, PeriodicGradientWraps) {
  const Grid g = Grid::uniform(Box::unit(1), 4);
  GridField u = GridField::zeros(g, 1, Boundary::Periodic, Centering::Node);
  ASSERT_EQ(u.point_count(), 4u);
  u.at(0) = 1.0;
  const GridField d = gradient(u);
  EXPECT_NEAR(d.at(3), 4.0, 1e-12);  // (u(0) - u(3)) / h across the seam
}

TEST(Field, MidpointIntegrationOfQuadratic) {
  // Midpoint rule on x^2 over (0,1) with n cells: 1/3 - 1/(12 n^2).
  const int n = 10;
  const GridField u = sample_cells([](const Point& x) { return x[0] * x[0]; }, Grid::uniform(Box::unit(1), n));
  EXPECT_NEAR(integrate(u), 1.0 / 3.0 - 1.0 / (12.0 * n * n), 1e-15);
}

TEST(Field, RejectsBadLayouts) {
  EXPECT_THROW(Grid::uniform(Box::unit(3), 4), ContractError);
  EXPECT_THROW(GridField(Grid::uniform(Box::unit(1), 4), 1, Boundary::Free, Centering::Cell, {1.0}), ContractError);
}

TEST(Unfold, DecompositionOfUnalignedEpsilon) {
  const EpsilonDecomposition d = decompose(Box::unit(1), 0.3);
  EXPECT_EQ(d.cell_count(), 3u);
  EXPECT_NEAR(d.measure_lambda, 0.1, 1e-12);
  EXPECT_NEAR(d.measure_interior(), 0.9, 1e-12);
  EXPECT_TRUE(decompose(Box::unit(2), 2.0).empty());
}

TEST(Unfold, AlignedUnfoldingMatchesDefinition) {
  // T_eps(w)(x, y) = w(eps [x/eps] + eps y), evaluated at cell centres.
  const double eps = 0.25;
  const int per = 4;
  const Grid g = Grid::uniform(Box::unit(2), 16);
  const auto fn = [](const Point& x) { return std::exp(x[0]) * std::cos(3.0 * x[1]); };
  const GridField w = sample_cells(fn, g);
  const UnfoldedField t = unfold(w, decompose(Box::unit(2), eps), per);
  ASSERT_TRUE(t.aligned());
  for (std::size_t xc = 0; xc < t.x_count(); xc += 7) {
    const Index xi{static_cast<int>(xc / 16), static_cast<int>(xc % 16)};
    const Point x = g.cell_center(xi);
    for (std::size_t yc = 0; yc < t.y_count(); ++yc) {
      const Point y = t.y_grid().cell_center({static_cast<int>(yc / per), static_cast<int>(yc % per)});
      const Point z{eps * std::floor(x[0] / eps) + eps * y[0], eps * std::floor(x[1] / eps) + eps * y[1]};
      EXPECT_NEAR(t.at(xc, yc), fn(z), 1e-12);
    }
  }
}

TEST(Unfold, ModularIdentityForPowerAgainstDirectSum) {
  const YoungFunction B = YoungFunction::power(3.0);
  const Grid g = Grid::uniform(Box::unit(1), 64);
  const GridField w = sample_cells([](const Point& x) { return std::sin(kTwoPi * x[0]) + 0.3; }, g);
  const ModularIdentityReport r = modular_identity_report(B, w, decompose(Box::unit(1), 0.125));
  double direct = 0.0;
  for (std::size_t c = 0; c < w.point_count(); ++c) direct += std::pow(std::fabs(w.at(c)), 3.0) / 64.0;
  EXPECT_NEAR(r.lhs, direct, 1e-13);
  EXPECT_LE(r.defect, 1e-13);
  EXPECT_EQ(r.lambda_gap, 0.0);
  EXPECT_TRUE(r.estimate_holds);
}

TEST(Unfold, ModularIdentityRefusesUnalignedGrid) {
  const GridField w = sample_cells([](const Point&) { return 1.0; }, Grid::uniform(Box::unit(1), 10));
  EXPECT_THROW(modular_identity_report(YoungFunction::power(2.0), w, decompose(Box::unit(1), 0.25)), ContractError);
}

TEST(Unfold, UciBoundaryLayerMassMatchesClosedForm) {
  // w = 1 + x: the layer (0.9, 1) carries int (1 + x) dx = 0.195.
  const GridField w = sample_cells([](const Point& x) { return 1.0 + x[0]; }, Grid::uniform(Box::unit(1), 10));
  const auto r = uci_defect(YoungFunction::power(2.0), {{0.3, w}});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].aligned);
  EXPECT_NEAR(r[0].lambda_mass, 0.195, 1e-14);
  EXPECT_NEAR(r[0].gap, 0.195, 1e-13);
}

TEST(Unfold, TwoScalePairingOfOscillation) {
  const double eps = 1.0 / 16;
  const GridField v = sample_cells([&](const Point& x) { return std::sin(kTwoPi * x[0] / eps); },
                                   Grid::uniform(Box::unit(1), 256));
  const double p = two_scale_pairing(v, [](const Point&, const Point& y) { return std::sin(kTwoPi * y[0]); }, eps);
  EXPECT_NEAR(p, 0.5, 1e-12);
}

TEST(Unfold, LimitPairingOfProduct) {
  const double v = limit_pairing([](const Point& x, const Point&) { return x[0]; },
                                 [](const Point&, const Point& y) { return 1.0 + std::cos(kTwoPi * y[0]); },
                                 Box::unit(1), 64, 16);
  EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(Unfold, DictionaryIsNonEmptyAndBounded) {
  const auto d1 = weak_dictionary(1);
  EXPECT_EQ(d1.size(), 3u * 7u);  // 3 monomials x (1 + 2 * 3 trig terms)
  for (const auto& e : d1) EXPECT_TRUE(std::isfinite(e.phi(Point{0.3, 0.0}, Point{0.7, 0.0})));
}
