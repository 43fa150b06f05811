#include <gtest/gtest.h>

#include <cmath>

#include "uhom/errors.hpp"
#include "uhom/harness.hpp"

using namespace uhom;

namespace {

IntegrandSpec two_phase() {
  return IntegrandSpec::separable(Coefficient::piecewise(0, {0.5}, {1.0, 4.0}), Potential::power(2.0),
                                  GrowthMetadata{YoungFunction::power(2.0), 4.0, 0.0});
}

}  // namespace

TEST(Harness, ReciprocalInteger) {
  EXPECT_EQ(reciprocal_integer(0.125), 8);
  EXPECT_THROW(reciprocal_integer(0.3), ContractError);
}

TEST(Harness, AffineSweepEqualsCellSolve) {
  SweepOptions o;
  o.resolution = 32;
  const SweepReport r = eps_sweep_affine(two_phase(), {1.0}, o);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_LE(r.max_cross_check, 1e-10);
  EXPECT_TRUE(r.monotone);
  for (const auto& row : r.rows) EXPECT_NEAR(row.energy, 1.6, 1e-8);
}

TEST(Harness, InterpolantIsExactOnLinearDataAndRefusesExtrapolation) {
  HomTable t;
  t.t_ladder = {1};
  for (double x : {-1.0, 0.0, 0.5, 2.0}) {
    HomEstimate e;
    e.xi = {x};
    e.f_hom = 3.0 * x + 1.0;
    t.entries.push_back(e);
  }
  const HomInterpolant h(t);
  EXPECT_NEAR(h(std::vector<double>{1.25}), 4.75, 1e-14);
  EXPECT_THROW(h(std::vector<double>{2.5}), ContractError);
}

TEST(Harness, DirichletHalfSquareApproachesIntegralOfFhom) {
  // f_hom = 1.6 xi^2, u = x^2 / 2: int_0^1 1.6 x^2 = 1.6 / 3.
  HomTable table;
  LadderOptions lo;
  lo.t_ladder = {1, 2};
  lo.resolution = 32;
  std::vector<std::vector<double>> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back({-0.25 + 0.0625 * i});
  table = hom_table(two_phase(), grid, lo, 1);
  DirichletOptions o;
  o.resolution = 16;
  const SweepReport r = dirichlet_minimize(two_phase(), half_square_datum(1), table, o);
  EXPECT_NEAR(r.reference, 1.6 / 3.0, 2e-3);
  EXPECT_LE(std::fabs(r.rows.back().gap) / r.reference, 0.02);
}

TEST(Harness, ManufacturedOrderAndExactness) {
  const YoungFunction B = YoungFunction::power(2.0);
  const auto r = manufactured_unfolding_check(manufactured("half_square", "x_sin_y"), 1, {0.25, 0.125, 0.0625}, B);
  EXPECT_GE(r.observed_order, 0.9);
  const auto z = manufactured_unfolding_check(manufactured("zero", "sin_y"), 2, {0.25, 0.125}, B, 8);
  EXPECT_LE(z.max_error, 1e-10);
  EXPECT_THROW(manufactured("cubic", "zero"), ContractError);
}

TEST(Harness, RelaxationOfConvexIntegrandIsTrivial) {
  // For a convex W, Qf = f on the sampled range, so both pipelines agree.
  RelaxationOptions o;
  o.ladder.t_ladder = {1, 2};
  o.ladder.resolution = 16;
  const RelaxationReport r = relaxation_equivalence_check(two_phase(), {0.5, 1.0}, o);
  EXPECT_TRUE(r.pass);
  for (const auto& row : r.rows) EXPECT_NEAR(row.f_hom, row.f_hom_relaxed, 1e-8);
}
