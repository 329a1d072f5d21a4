#include <gtest/gtest.h>

#include "support/testing.hpp"

using namespace bor;
using bor::testing::fixture_op;
using bor::testing::vec;

namespace {

std::vector<RatVector> rows_of(const std::vector<FamilyRow>& rows) {
  std::vector<RatVector> out;
  for (const auto& r : rows) out.push_back(r.row);
  return out;
}

ProductFamily family(std::vector<std::vector<RatVector>> per_state) {
  ProductFamily f;
  for (auto& rows : per_state) {
    f.per_state_rows.emplace_back();
    for (auto& r : rows) f.per_state_rows.back().push_back({"", std::move(r)});
  }
  return f;
}

}  // namespace

TEST(ProductFamily, FromFixtures) {
  const auto m2 = fixture_op("m2", Objective::Max);
  const auto f2 = build_product_family(m2, fixed_point(m2));
  EXPECT_EQ(rows_of(f2.per_state_rows[0]),
            (std::vector<RatVector>{vec({"1/3", "1/3", "1/3"}), vec({"1/2", "1/4", "1/4"})}));
  EXPECT_EQ(rows_of(f2.per_state_rows[1]), std::vector<RatVector>{vec({"1/3", "1/3", "0"})});
  EXPECT_EQ(rows_of(f2.per_state_rows[2]), std::vector<RatVector>{vec({"1/3", "0", "1/3"})});
  EXPECT_EQ(f2.size(), 2u);
  EXPECT_FALSE(f2.is_singleton());

  const auto m3 = fixture_op("m3", Objective::Max);
  const auto f3 = build_product_family(m3, fixed_point(m3));
  EXPECT_EQ(rows_of(f3.per_state_rows[0]),
            (std::vector<RatVector>{vec({"1/2", "1/3"}), vec({"1/2", "1/5"})}));
  EXPECT_EQ(rows_of(f3.per_state_rows[1]), std::vector<RatVector>{vec({"1/2", "1/5"})});

  // Leaking actions are left out.
  const auto m1 = fixture_op("m1", Objective::Max);
  const auto f1 = build_product_family(m1, fixed_point(m1));
  ASSERT_EQ(f1.per_state_rows[0].size(), 1u);
  EXPECT_EQ(f1.per_state_rows[0][0].action, "alpha");

  EXPECT_ERRC(build_product_family(m1, vec({"0", "0", "0"})), Errc::NotAFixedPoint);
}

TEST(ProductFamily, ActionsIntoTargetAndSinkGiveZeroRows) {
  Mdp m;
  m.decision_states = {"s1", "s2"};
  m.target = "t";
  m.sink = "fail";
  m.actions = {{"a", "s1", {{"t", Rational(1, 3)}, {"fail", Rational(2, 3)}}},
               {"b", "s2", {{"t", Rational(1)}}}};
  const BellmanOperator op(m, Objective::Max);
  const auto f = build_product_family(op, fixed_point(op));
  EXPECT_TRUE(f.is_singleton());
  EXPECT_EQ(f.matrix({0, 0}), zero_matrix(2, 2));
}

TEST(PfrMap, TwoStepCollapse) {
  const auto m3 = fixture_op("m3", Objective::Max);
  const auto f = build_product_family(m3, fixed_point(m3));
  const RatVector e1 = pfr_map(f, vec({"-31/315", "1/6"}), Objective::Max);
  EXPECT_EQ(e1, vec({"2/315", "-1/63"}));
  EXPECT_EQ(pfr_map(f, e1, Objective::Max), vec({"0", "0"}));
  EXPECT_EQ(pfr_map(f, vec({"0", "0"}), Objective::Min), vec({"0", "0"}));
  EXPECT_ERRC(pfr_map(f, vec({"0"}), Objective::Max), Errc::DimensionMismatch);
}

TEST(PfrMap, ScheduleOfGeneratorsOnMixedShift) {
  const auto m2 = fixture_op("m2", Objective::Max);
  const auto f = build_product_family(m2, fixed_point(m2));
  const RatVector eps = vec({"-1/2", "1/3", "1/3"});
  // Neither generator alone ever kills eps, but the family map does in two
  // steps, first through alpha1 and then through alpha2.
  EXPECT_EQ(kernel_chain_zero(f.matrix({0, 0, 0}), eps), std::nullopt);
  EXPECT_EQ(kernel_chain_zero(f.matrix({1, 0, 0}), eps), std::nullopt);
  const RatVector e1 = pfr_map(f, eps, Objective::Max);
  EXPECT_EQ(e1, vec({"1/18", "-1/18", "-1/18"}));
  EXPECT_EQ(pfr_map(f, e1, Objective::Max), vec({"0", "0", "0"}));
  EXPECT_EQ(mat_vec(f.matrix({1, 0, 0}), mat_vec(f.matrix({0, 0, 0}), eps)), vec({"0", "0", "0"}));
}

TEST(Shift, RoundTrip) {
  const RatVector mu = vec({"1/2", "1/2", "1/2"});
  EXPECT_EQ(shift(vec({"0", "5/6", "5/6"}), mu), vec({"-1/2", "1/3", "1/3"}));
  EXPECT_TRUE(is_zero(shift(mu, mu)));
  bor::testing::Rng rng(41);
  for (int k = 0; k < 50; ++k) {
    const RatVector x = bor::testing::random_unit_vector(rng, 3);
    EXPECT_EQ(unshift(shift(x, mu), mu), x);
  }
  EXPECT_ERRC(shift(vec({"1"}), mu), Errc::DimensionMismatch);
}

TEST(LineAngle, Examples) {
  EXPECT_EQ(line_angle_cmp(vec({"1", "0"}), vec({"0", "1"})), AngleOrder::Less);
  EXPECT_EQ(line_angle_cmp(vec({"1/2", "1/3"}), vec({"1/2", "1/5"})), AngleOrder::Greater);
  EXPECT_EQ(line_angle_cmp(vec({"1/2", "1/3"}), vec({"1/4", "1/6"})), AngleOrder::Equal);
  EXPECT_ERRC(line_angle_cmp(vec({"0", "0"}), vec({"1", "0"})), Errc::ZeroRow);
  EXPECT_ERRC(line_angle_cmp(vec({"1", "0", "0"}), vec({"1", "0"})), Errc::DimensionMismatch);
}

TEST(LineAngle, TotalPreorderOnRandomRows) {
  bor::testing::Rng rng(43);
  auto row = [&] {
    RatVector r;
    do r = bor::testing::random_unit_vector(rng, 2, 6);
    while (is_zero(r));
    return r;
  };
  auto flip = [](AngleOrder o) {
    return o == AngleOrder::Less ? AngleOrder::Greater
           : o == AngleOrder::Greater ? AngleOrder::Less
                                      : AngleOrder::Equal;
  };
  for (int k = 0; k < 500; ++k) {
    const RatVector a = row(), b = row(), c = row();
    EXPECT_EQ(line_angle_cmp(a, b), flip(line_angle_cmp(b, a)));
    const auto ab = line_angle_cmp(a, b), bc = line_angle_cmp(b, c), ac = line_angle_cmp(a, c);
    if (ab != AngleOrder::Greater && bc != AngleOrder::Greater) {
      EXPECT_NE(ac, AngleOrder::Greater);
      if (ab == AngleOrder::Less || bc == AngleOrder::Less) EXPECT_EQ(ac, AngleOrder::Less);
    }
  }
}

TEST(KernelLines, Examples) {
  const auto m3 = fixture_op("m3", Objective::Max);
  const auto k3 = kernel_lines(build_product_family(m3, fixed_point(m3)));
  ASSERT_EQ(k3.lines.size(), 1u);
  EXPECT_EQ(k3.lines[0].direction, vec({"-2", "5"}));
  EXPECT_TRUE(k3.lines[0].lo);
  EXPECT_TRUE(k3.lines[0].hi);
  EXPECT_FALSE(k3.full_plane);

  EXPECT_TRUE(kernel_lines(family({{vec({"1/2", "1/3"})}, {vec({"1/2", "1/5"})}})).lines.empty());

  const auto z = kernel_lines(family({{vec({"0", "0"})}, {vec({"1/4", "1/2"})}}));
  ASSERT_EQ(z.lines.size(), 1u);
  EXPECT_EQ(z.lines[0].direction, vec({"-2", "1"}));

  const auto full = kernel_lines(family({{vec({"0", "0"})}, {vec({"0", "0"}), vec({"1", "0"})}}));
  EXPECT_TRUE(full.full_plane);
  ASSERT_EQ(full.lines.size(), 1u);
  EXPECT_EQ(full.lines[0].direction, vec({"0", "1"}));

  EXPECT_ERRC(kernel_lines(family({{vec({"1"})}})), Errc::DimensionMismatch);
}

TEST(KernelLines, SortedAndInSecondQuadrant) {
  bor::testing::Rng rng(47);
  for (int k = 0; k < 200; ++k) {
    std::vector<std::vector<RatVector>> rows(2);
    for (auto& r : rows) {
      const std::size_t n = bor::testing::uniform(rng, 1, 3);
      for (std::size_t i = 0; i < n; ++i) {
        RatVector v = bor::testing::random_unit_vector(rng, 2, 4);
        if (i > 0 && bor::testing::uniform(rng, 0, 1)) v = bor::testing::random_rational(rng, 3) * rows[0][0];
        r.push_back(v);
      }
    }
    const auto lines = kernel_lines(family(rows));
    for (std::size_t i = 0; i < lines.lines.size(); ++i) {
      const auto& dir = lines.lines[i].direction;
      EXPECT_TRUE(dir[0] <= 0 && dir[1] >= 0 && !is_zero(dir));
      if (i > 0)
        EXPECT_EQ(direction_angle_cmp(lines.lines[i - 1].direction, dir), AngleOrder::Less);
      EXPECT_EQ(lines.lines[i].hi, i == 0);
      EXPECT_EQ(lines.lines[i].lo, i + 1 == lines.lines.size());
    }
  }
}

TEST(PlanarDecision, TwoStepHit) {
  const auto op = fixture_op("m3", Objective::Max);
  const RatVector mu = fixed_point(op);
  EXPECT_EQ(tight_radius(op, mu), Rational(1, 12));
  // The worked shift has norm 1/6; a quarter of it lies inside the radius.
  const RatVector x = unshift(Rational(1, 4) * vec({"-31/315", "1/6"}), mu);
  const auto outcome = decide_planar_incomparable(op, x, mu);
  ASSERT_TRUE(std::holds_alternative<planar::Hit>(outcome));
  EXPECT_EQ(std::get<planar::Hit>(outcome).steps, 2u);
}

TEST(PlanarDecision, KernelLineHitsInOneStep) {
  const auto op = fixture_op("m3", Objective::Max);
  const RatVector mu = fixed_point(op);
  // Opposite ray of the kernel direction (-2, 5): alpha2 and beta1 vanish,
  // alpha1 is negative, so the max is 0 in both coordinates.
  const RatVector eps = vec({"1/60", "-1/24"});
  const auto f = build_product_family(op, mu);
  EXPECT_EQ(pfr_map(f, eps, Objective::Max), vec({"0", "0"}));
  const auto outcome = decide_planar_incomparable(op, unshift(eps, mu), mu);
  ASSERT_TRUE(std::holds_alternative<planar::Hit>(outcome));
  EXPECT_EQ(std::get<planar::Hit>(outcome).steps, 1u);
}

TEST(PlanarDecision, NeverVerdictsAgreeWithIteration) {
  const auto op = fixture_op("m3", Objective::Max);
  const RatVector mu = fixed_point(op);
  int never = 0, cont = 0;
  for (int p = -7; p <= 7; ++p)
    for (int q = -7; q <= 7; ++q) {
      const RatVector eps{Rational(p, 96), Rational(q, 96)};
      const RatVector x = unshift(eps, mu);
      if (comparable(x, mu)) continue;
      const auto outcome = decide_planar_incomparable(op, x, mu);
      if (std::holds_alternative<planar::Never>(outcome)) {
        ++never;
        EXPECT_EQ(brute_force_reach(op, x, mu, 2000), std::nullopt) << format_vector(eps);
      } else if (const auto* c = std::get_if<planar::Continue>(&outcome)) {
        ++cont;
        EXPECT_EQ(c->offset, 2u);
        EXPECT_TRUE(comparable(c->iterate, mu));
      }
    }
  EXPECT_GT(never + cont, 0);
}

TEST(PlanarDecision, Preconditions) {
  const auto op = fixture_op("m3", Objective::Max);
  const RatVector mu = fixed_point(op);
  EXPECT_ERRC(decide_planar_incomparable(op, vec({"1", "1"}), mu), Errc::PreconditionViolated);
  EXPECT_ERRC(decide_planar_incomparable(op, vec({"1", "0"}), mu), Errc::PreconditionViolated);
  const auto m1 = fixture_op("m1", Objective::Max);
  EXPECT_ERRC(decide_planar_incomparable(m1, vec({"1", "0", "0"}), fixed_point(m1)),
              Errc::PreconditionViolated);
}

TEST(Properties, ShiftCommutesInsideTightRadius) {
  bor::testing::Rng rng(53);
  for (int trial = 0; trial < 150; ++trial) {
    const Mdp m = bor::testing::random_ec_free_mdp(rng, bor::testing::uniform(rng, 1, 3));
    const Objective obj = trial % 2 ? Objective::Max : Objective::Min;
    const BellmanOperator op(m, obj);
    const RatVector mu = fixed_point(op);
    const auto fam = build_product_family(op, mu);
    RatVector x = bor::testing::random_near(rng, mu, tight_radius(op, mu));
    RatVector eps = shift(x, mu);
    for (int n = 0; n < 20; ++n) {
      x = bor::apply(op, x).value;
      eps = pfr_map(fam, eps, obj);
      ASSERT_EQ(shift(x, mu), eps) << "n=" << n;
    }
  }
}

TEST(Properties, PfrMapIsPositivelyHomogeneous) {
  bor::testing::Rng rng(59);
  for (int trial = 0; trial < 200; ++trial) {
    const Mdp m = bor::testing::random_ec_free_mdp(rng, bor::testing::uniform(rng, 1, 3));
    const Objective obj = trial % 2 ? Objective::Max : Objective::Min;
    const BellmanOperator op(m, obj);
    const auto fam = build_product_family(op, fixed_point(op));
    RatVector eps;
    for (std::size_t i = 0; i < op.dimension(); ++i)
      eps.push_back(bor::testing::random_rational(rng) - bor::testing::random_rational(rng));
    const Rational lambda = bor::testing::random_rational(rng) + Rational(1, 9);
    EXPECT_EQ(pfr_map(fam, lambda * eps, obj), lambda * pfr_map(fam, eps, obj));
  }
}
