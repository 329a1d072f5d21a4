#include <gtest/gtest.h>

#include "support/testing.hpp"

using namespace bor;
using bor::testing::fixture;

namespace {

Mdp two_state() {
  Mdp m;
  m.decision_states = {"s1", "s2"};
  m.target = "t";
  m.sink = "s3";
  m.actions = {
      {"alpha", "s1", {{"s2", Rational(1, 2)}, {"t", Rational(1, 3)}, {"s3", Rational(1, 6)}}},
      {"beta1", "s2", {{"s1", Rational(1, 2)}, {"t", Rational(1, 2)}}},
      {"beta2", "s2", {{"s1", Rational(1, 4)}, {"s2", Rational(1, 4)}, {"t", Rational(1, 2)}}},
  };
  return m;
}

// s1 --a--> u (prob 1/2) or t; u loops on itself with probability one.
Mdp self_loop() {
  Mdp m;
  m.decision_states = {"s1", "u"};
  m.target = "t";
  m.sink = "fail";
  m.actions = {
      {"a", "s1", {{"u", Rational(1, 2)}, {"t", Rational(1, 2)}}},
      {"loop", "u", {{"u", Rational(1)}}},
  };
  return m;
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Validate, TwoStateModelIsValid) {
  EXPECT_TRUE(validate_mdp(two_state()).empty());
  EXPECT_EQ(fixture("twostate"), two_state());
}

TEST(Validate, ReportsBadSum) {
  Mdp m = two_state();
  m.actions[1].dist["s1"] = Rational(2, 3);
  EXPECT_TRUE(contains(validate_mdp(m), "distribution sums to 7/6"));
  EXPECT_ERRC(require_valid(m), Errc::InvalidMdp);
}

TEST(Validate, ReportsDuplicateActionId) {
  Mdp m = two_state();
  Action dup = m.actions[2];
  dup.owner = "s1";
  m.actions.push_back(dup);
  EXPECT_TRUE(contains(validate_mdp(m), "duplicate action id"));
}

TEST(Validate, ReportsStructuralProblems) {
  Mdp m = two_state();
  m.actions.push_back({"ghost", "s1", {{"nowhere", Rational(1)}}});
  m.actions.push_back({"neg", "s1", {{"t", Rational(3, 2)}, {"s1", Rational(-1, 2)}}});
  m.actions.push_back({"absorbing", "t", {{"t", Rational(1)}}});
  m.decision_states.push_back("lonely");
  const auto v = validate_mdp(m);
  EXPECT_TRUE(contains(v, "unknown state 'nowhere'"));
  EXPECT_TRUE(contains(v, "outside (0,1]"));
  EXPECT_TRUE(contains(v, "absorbing state 't'"));
  EXPECT_TRUE(contains(v, "'lonely' has no actions"));

  Mdp same = two_state();
  same.sink = "t";
  EXPECT_TRUE(contains(validate_mdp(same), "coincide"));
  EXPECT_TRUE(contains(validate_mdp(Mdp{}), "no decision states"));
}

TEST(EndComponents, FixturesHaveNone) {
  for (const char* name : {"m1", "m2", "m3", "twostate"})
    EXPECT_TRUE(maximal_end_components(fixture(name)).empty()) << name;
}

TEST(EndComponents, SelfLoop) {
  const auto mecs = maximal_end_components(self_loop());
  ASSERT_EQ(mecs.size(), 1u);
  EXPECT_EQ(mecs[0].states, std::set<std::string>{"u"});
  EXPECT_EQ(mecs[0].actions, std::set<std::string>{"loop"});
}

TEST(EndComponents, PrunesEscapingActions) {
  // s1 <-> s2 via a and b, plus escaping actions; s3 is transient.
  Mdp m;
  m.decision_states = {"s1", "s2", "s3"};
  m.target = "t";
  m.sink = "fail";
  m.actions = {
      {"a", "s1", {{"s2", Rational(1)}}},
      {"a_out", "s1", {{"s2", Rational(1, 2)}, {"t", Rational(1, 2)}}},
      {"b", "s2", {{"s1", Rational(1)}}},
      {"c", "s3", {{"s1", Rational(1, 2)}, {"s3", Rational(1, 2)}}},
  };
  const auto mecs = maximal_end_components(m);
  ASSERT_EQ(mecs.size(), 1u);
  EXPECT_EQ(mecs[0].states, (std::set<std::string>{"s1", "s2"}));
  EXPECT_EQ(mecs[0].actions, (std::set<std::string>{"a", "b"}));
}

TEST(RemoveEndComponents, SelfLoopGoesToSink) {
  for (Objective obj : {Objective::Min, Objective::Max}) {
    const Mdp r = remove_end_components(self_loop(), obj);
    EXPECT_EQ(r.decision_states, std::vector<std::string>{"s1"});
    EXPECT_TRUE(validate_mdp(r).empty());
    EXPECT_TRUE(maximal_end_components(r).empty());
    EXPECT_EQ(r.actions[0].dist.at("fail"), Rational(1, 2));
  }
}

TEST(RemoveEndComponents, EcFreeIsUnchanged) {
  const Mdp m = fixture("m1");
  EXPECT_EQ(remove_end_components(m, Objective::Max), m);
  EXPECT_EQ(remove_end_components(m, Objective::Min), m);
}

TEST(RemoveEndComponents, MaxContractsLeavingComponent) {
  Mdp m;
  m.decision_states = {"s1", "s2"};
  m.target = "t";
  m.sink = "fail";
  m.actions = {
      {"a", "s1", {{"s2", Rational(1)}}},
      {"b", "s2", {{"s1", Rational(1)}}},
      {"exit", "s2", {{"s1", Rational(1, 4)}, {"t", Rational(1, 2)}, {"fail", Rational(1, 4)}}},
  };
  const Mdp r = remove_end_components(m, Objective::Max);
  ASSERT_EQ(r.decision_states, std::vector<std::string>{"mec_s1_s2"});
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].id, "exit");
  EXPECT_EQ(r.actions[0].dist.at("mec_s1_s2"), Rational(1, 4));
  EXPECT_TRUE(maximal_end_components(r).empty());
  const BellmanOperator op(r, Objective::Max);
  EXPECT_EQ(fixed_point(op), bor::testing::vec({"2/3"}));
}

// Reduction preserves optimal reachability: surviving states keep their
// value, contracted members share the fresh state's value and states sent to
// the sink had value 0.
TEST(RemoveEndComponents, PreservesOptimalValuesOnRandomModels) {
  bor::testing::Rng rng(2024);
  int with_ecs = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t d = bor::testing::uniform(rng, 1, 4);
    const Mdp m = bor::testing::random_mdp(rng, d, 3, 4);
    const auto mecs = maximal_end_components(m);
    if (mecs.empty()) continue;
    ++with_ecs;
    for (Objective obj : {Objective::Max, Objective::Min}) {
      const Mdp r = remove_end_components(m, obj);
      const RatVector before = bor::testing::oracle_fixed_point(m, obj);
      if (r.dimension() == 0) {
        // Every state collapsed into the sink.
        for (const auto& v : before) EXPECT_EQ(v, 0);
        continue;
      }
      ASSERT_TRUE(validate_mdp(r).empty());
      EXPECT_TRUE(maximal_end_components(r).empty());
      EXPECT_LE(r.dimension(), m.dimension());
      const RatVector after = bor::testing::oracle_fixed_point(r, obj);
      for (std::size_t i = 0; i < m.dimension(); ++i) {
        const std::string& s = m.decision_states[i];
        std::string image = s;
        for (const auto& ec : mecs)
          if (ec.states.count(s)) {
            image = r.sink;
            for (const auto& rs : r.decision_states)
              if (rs.rfind("mec", 0) == 0 && rs.find("_" + s) != std::string::npos &&
                  !m.index_of(rs))
                image = rs;
          }
        if (image == r.sink)
          EXPECT_EQ(before[i], 0) << s;
        else
          EXPECT_EQ(before[i], after[*r.index_of(image)]) << s;
      }
    }
  }
  EXPECT_GT(with_ecs, 50);
}

TEST(RemoveEndComponents, FreshNamesAvoidCollisions) {
  Mdp m;
  m.decision_states = {"x", "mec_x"};
  m.target = "t";
  m.sink = "fail";
  m.actions = {
      {"stay", "x", {{"x", Rational(1)}}},
      {"go", "x", {{"t", Rational(1)}}},
      {"y", "mec_x", {{"x", Rational(1)}}},
  };
  const Mdp r = remove_end_components(m, Objective::Max);
  EXPECT_EQ(r.decision_states, (std::vector<std::string>{"mec_x'", "mec_x"}));
  EXPECT_EQ(r.actions_of("mec_x")[0]->dist.at("mec_x'"), Rational(1));
}
