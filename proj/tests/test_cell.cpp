#include <gtest/gtest.h>

#include <cmath>

#include "uhom/cell.hpp"
#include "uhom/errors.hpp"
#include "uhom/parallel.hpp"

using namespace uhom;

namespace {

IntegrandSpec two_phase(double p) {
  return IntegrandSpec::separable(Coefficient::piecewise(0, {0.5}, {1.0, 4.0}), Potential::power(p),
                                  GrowthMetadata{YoungFunction::power(p), 4.0, 0.0});
}

// 1D convex duality: f_hom(xi) = (int_Y a^{-1/(p-1)})^{-(p-1)} |xi|^p, by midpoint quadrature.
double duality_oracle(const Coefficient& a, double p, double xi) {
  const int n = 4000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::pow(a(Point{(i + 0.5) / n, 0.0}), -1.0 / (p - 1.0)) / n;
  return std::pow(s, -(p - 1.0)) * std::pow(std::fabs(xi), p);
}

}  // namespace

TEST(Cell, OneDimensionalDualityOracle) {
  for (double p : {2.0, 3.0}) {
    const IntegrandSpec s = two_phase(p);
    LadderOptions o;
    o.resolution = 64;
    for (double xi : {-2.0, 0.5, 1.5}) {
      const HomEstimate e = estimate_f_hom(s, std::vector<double>{xi}, o);
      const double oracle = duality_oracle(s.coefficient(), p, xi);
      EXPECT_NEAR(e.f_hom, oracle, 1e-6 * oracle) << "p=" << p << " xi=" << xi;
      EXPECT_TRUE(e.any_success);
    }
  }
}

TEST(Cell, LaminatePeriodicIsHarmonicAcrossArithmeticAlong) {
  const IntegrandSpec s = IntegrandSpec::separable(Coefficient::piecewise(0, {0.5}, {1.0, 4.0}), Potential::power(2.0),
                                                   GrowthMetadata{YoungFunction::power(2.0), 4.0, 0.0}, 2, 1);
  CellProblem pb{s, {1.0, 1.0}, 1, 16, SolverConfig{}, CellBoundary::Periodic};
  const CellSolution sol = solve_cell(pb);
  EXPECT_NEAR(sol.f_t_value, 1.6 + 2.5, 1e-6);
}

TEST(Cell, JensenBracketAndSubadditivity) {
  const IntegrandSpec s = two_phase(2.0);
  LadderOptions o;
  o.resolution = 32;
  const std::vector<double> xi{1.3};
  const HomEstimate e = estimate_f_hom(s, xi, o);
  for (std::size_t i = 0; i < e.f_t.size(); ++i) {
    EXPECT_GE(e.f_t[i], 1.3 * 1.3 - 1e-8);  // B(|xi|) with B = t^2 and a >= 1
    EXPECT_LE(e.f_t[i], e.zero_energy[i] + 1e-12);
  }
  for (double d : e.defects) EXPECT_LE(d, 1e-6);
}

TEST(Cell, TileFieldRepeatsPeriod) {
  const Grid g = cell_grid(1, 1, 4);
  GridField v(g, 1, Boundary::ZeroBoundary, Centering::Node, {0.0, 1.0, 2.0, 1.0, 0.0});
  const GridField t = tile_field(v, 3);
  ASSERT_EQ(t.point_count(), 13u);
  for (std::size_t i = 0; i < t.point_count(); ++i) EXPECT_EQ(t.at(i), v.at(i % 4));
}

TEST(Cell, CellEnergyRejectsBoundaryViolation) {
  const Grid g = cell_grid(1, 1, 4);
  EXPECT_THROW(GridField(g, 1, Boundary::ZeroBoundary, Centering::Node, {1.0, 0.0, 0.0, 0.0, 0.0}), ContractError);
  GridField v(g, 1, Boundary::Free, Centering::Node, {1.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(cell_energy(two_phase(2.0), std::vector<double>{1.0}, v), ContractError);
}

TEST(Cell, TableIsIndependentOfThreadCount) {
  const IntegrandSpec dw = IntegrandSpec::separable(Coefficient::piecewise(0, {0.5}, {1.0, 2.0}), Potential::double_well());
  LadderOptions o;
  o.t_ladder = {1, 2};
  o.resolution = 16;
  const std::vector<std::vector<double>> grid{{0.0}, {0.4}, {1.2}, {1.7}};
  const HomTable a = hom_table(dw, grid, o, 1);
  const HomTable b = hom_table(dw, grid, o, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ASSERT_EQ(a.entries[i].f_t.size(), b.entries[i].f_t.size());
    for (std::size_t k = 0; k < a.entries[i].f_t.size(); ++k) EXPECT_EQ(a.entries[i].f_t[k], b.entries[i].f_t[k]);
  }
}

TEST(Parallel, DerivedSeedsDifferAndRepeat) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw DataError("x"); }), DataError);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.6), "1.6");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}
