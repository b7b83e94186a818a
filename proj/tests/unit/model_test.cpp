#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "fixtures.hpp"
#include "ltv/error.hpp"
#include "ltv/instance_generator.hpp"
#include "ltv/model.hpp"
#include "ltv/random.hpp"

namespace ltv {
namespace {

using testing::t1;

DagModel with_states(const DagModel& base, std::vector<StateSpec> states) {
  return DagModel(std::move(states), base.init(), base.loss(), base.survive(), base.r_max());
}

std::size_t position(const std::vector<StateId>& order, StateId s) {
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), s) - order.begin());
}

void expect_reverse_topological(const DagModel& model, const std::vector<StateId>& order) {
  ASSERT_EQ(order.size(), model.size());
  EXPECT_EQ(order.front(), model.survive());
  EXPECT_EQ(order[1], model.loss());
  EXPECT_EQ(order.back(), model.init());
  for (std::uint32_t u = 0; u < model.size(); ++u)
    for (const auto& a : model.states()[u].actions)
      for (const auto& t : a.transitions)
        if (!model.is_terminal(t.target))
          EXPECT_LT(position(order, t.target), position(order, StateId{u}));
}

TEST(ValidateModel, AcceptsT1) {
  const auto report = validate_model(t1());
  EXPECT_TRUE(report.ok()) << report.summary();
}

TEST(ValidateModel, ReportsProbabilitySum) {
  auto states = t1().states();
  states[0].actions[0].transitions[0].probability = 0.5;
  states[0].actions[0].transitions[1].probability = 0.6;
  const auto report = validate_model(with_states(t1(), states));
  ASSERT_FALSE(report.ok());
  ASSERT_TRUE(report.has("probability-sum"));
  const auto& v = report.violations.front();
  EXPECT_EQ(v.rule, "probability-sum");
  EXPECT_EQ(v.where.state, StateId{0});
  EXPECT_EQ(v.where.action, 0u);
}

TEST(ValidateModel, ReportsSelfLoopAsCycle) {
  auto states = t1().states();
  // Keep the sum at one so the cycle is the only problem.
  states[0].actions[0].transitions = {{StateId{0}, 0.5, 0.0}, {StateId{1}, 0.5, 0.0}};
  const auto report = validate_model(with_states(t1(), states));
  EXPECT_TRUE(report.has("acyclic"));
  EXPECT_FALSE(report.has("probability-sum"));
}

TEST(ValidateModel, ReportsEachStructuralRule) {
  const auto base = t1();
  {
    auto states = base.states();
    states[0].actions[1].transitions.push_back({StateId{1}, 0.0, 0.0});
    EXPECT_TRUE(validate_model(with_states(base, states)).has("zero-probability"));
  }
  {
    auto states = base.states();
    states[0].actions[0].transitions[0].reward = -0.1;
    EXPECT_TRUE(validate_model(with_states(base, states)).has("negative-reward"));
  }
  {
    auto states = base.states();
    states[0].actions[0].transitions[0].reward = 2.0;
    EXPECT_TRUE(validate_model(with_states(base, states)).has("reward-bound"));
  }
  {
    auto states = base.states();
    states[0].actions[0].transitions[0].target = StateId{9};
    EXPECT_TRUE(validate_model(with_states(base, states)).has("target-range"));
  }
  {
    auto states = base.states();
    states[2].actions.push_back({"stay", {{StateId{2}, 1.0, 0.0}}});
    EXPECT_TRUE(validate_model(with_states(base, states)).has("terminal-actions"));
  }
  {
    auto states = base.states();
    states[0].actions.clear();
    EXPECT_TRUE(validate_model(with_states(base, states)).has("no-actions"));
  }
  {
    auto states = base.states();
    states.push_back({"orphan", {{"go", {{StateId{2}, 1.0, 0.0}}}}});
    const auto report = validate_model(with_states(base, states));
    EXPECT_TRUE(report.has("reachable-from-init"));
    EXPECT_FALSE(report.has("reaches-terminal"));
  }
  {
    auto states = base.states();
    states[1].label = "init";
    EXPECT_TRUE(validate_model(with_states(base, states)).has("label-unique"));
  }
  EXPECT_TRUE(validate_model(DagModel(base.states(), StateId{0}, StateId{0}, StateId{2}, 1.0))
                  .has("terminal-distinct"));
  EXPECT_TRUE(validate_model(DagModel(base.states(), StateId{0}, StateId{7}, StateId{2}, 1.0))
                  .has("terminal-index"));
  EXPECT_TRUE(validate_model(DagModel(base.states(), StateId{0}, StateId{1}, StateId{2}, -1.0))
                  .has("r-max"));
}

TEST(ValidateModel, IdempotentOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto model = random_instance({}, seed);
    const auto first = validate_model(model);
    const auto second = validate_model(model);
    EXPECT_TRUE(first.ok()) << first.summary();
    EXPECT_EQ(first.summary(), second.summary());
  }
}

TEST(TopologicalOrder, SingleDecisionState) {
  const auto order = topological_order(t1());
  EXPECT_EQ(order, (std::vector<StateId>{StateId{2}, StateId{1}, StateId{0}}));
}

TEST(TopologicalOrder, PushGridRespectsEdges) {
  const auto model = testing::constant_push(2, 1, 0.5, 0.2);
  const auto order = topological_order(model);
  expect_reverse_topological(model, order);
  std::vector<std::string> labels;
  for (auto s : order) labels.push_back(model.state(s).label);
  EXPECT_EQ(labels, (std::vector<std::string>{"survive", "loss", "(2,0)", "(2,1)", "(1,0)",
                                              "(1,1)", "(0,0)"}));
}

TEST(TopologicalOrder, PropertyOnRandomAndPushModels) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto model = random_instance({}, seed);
    expect_reverse_topological(model, topological_order(model));
  }
  const auto push = testing::fatigue_push(30, 5);
  expect_reverse_topological(push, topological_order(push));
}

TEST(TopologicalOrder, ThrowsOnCycle) {
  auto states = t1().states();
  states.push_back({"x", {{"go", {{StateId{4}, 1.0, 0.0}}}}});
  states.push_back({"y", {{"go", {{StateId{3}, 1.0, 0.0}}}}});
  states[0].actions[0].transitions = {{StateId{3}, 0.5, 0.0}, {StateId{1}, 0.5, 0.0}};
  try {
    topological_order(with_states(t1(), states));
    FAIL() << "expected CycleDetected";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycleDetected);
  }
}

TEST(CheckBoundedness, T1IsBounded) { EXPECT_EQ(check_boundedness(t1()), Boundedness::kBounded); }

TEST(CheckBoundedness, SkipEverythingIsZeroValueImmortal) {
  const auto model = testing::constant_push(3, 2, 0.4, 0.1);
  EXPECT_EQ(check_boundedness(model), Boundedness::kZeroValueImmortal);
}

TEST(CheckBoundedness, SpuriousSkipRewardIsUnbounded) {
  const auto base = testing::constant_push(3, 2, 0.4, 0.1);
  auto states = base.states();
  // (1,0) is state 1; its skip action is the second one.
  ASSERT_EQ(states[1].label, "(1,0)");
  ASSERT_EQ(states[1].actions[1].label, "skip");
  states[1].actions[1].transitions[0].reward = 0.1;
  EXPECT_EQ(check_boundedness(with_states(base, states)), Boundedness::kUnboundedLtv);
}

// Random models where some actions never risk loss.
DagModel random_mixed_instance(std::uint64_t seed) {
  auto base = random_instance({6, 3, 0.01, 0.5, 1.0}, seed);
  SplitMix64 rng(seed ^ 0xabcdef);
  auto states = base.states();
  for (std::uint32_t i = 0; i < states.size(); ++i) {
    for (auto& action : states[i].actions) {
      if (rng.uniform() < 0.5) {
        std::vector<Transition> kept;
        double mass = 0.0;
        for (const auto& t : action.transitions)
          if (t.target != base.loss()) {
            kept.push_back(t);
            mass += t.probability;
          }
        for (auto& t : kept) t.probability /= mass;
        action.transitions = kept;
      }
      if (rng.uniform() < 0.6)
        for (auto& t : action.transitions) t.reward = 0.0;
    }
  }
  return with_states(base, states);
}

// Reachability under a fixed policy: p = 1 iff loss unreachable, r > 0 iff a
// rewarded edge is reachable.
std::pair<bool, bool> immortal_and_rewarded(const DagModel& model, const Policy& policy) {
  std::vector<bool> seen(model.size(), false);
  std::vector<StateId> stack{model.init()};
  seen[model.init().index] = true;
  bool loss = false, reward = false;
  while (!stack.empty()) {
    const auto s = stack.back();
    stack.pop_back();
    if (s == model.loss()) loss = true;
    if (model.is_terminal(s)) continue;
    for (const auto& t : model.state(s).actions[policy[s]].transitions) {
      if (t.reward > 0.0) reward = true;
      if (!seen[t.target.index]) {
        seen[t.target.index] = true;
        stack.push_back(t.target);
      }
    }
  }
  return {!loss, reward};
}

TEST(CheckBoundedness, MatchesPolicyEnumeration) {
  std::map<Boundedness, int> seen;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto model = random_mixed_instance(seed);
    ASSERT_TRUE(validate_model(model).ok()) << validate_model(model).summary();
    std::vector<std::uint32_t> decision;
    for (std::uint32_t i = 0; i < model.size(); ++i)
      if (!model.is_terminal(StateId{i})) decision.push_back(i);
    Policy policy{std::vector<std::uint32_t>(model.size(), 0)};
    bool any_immortal = false, any_unbounded = false;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == decision.size()) {
        const auto [immortal, rewarded] = immortal_and_rewarded(model, policy);
        any_immortal |= immortal;
        any_unbounded |= immortal && rewarded;
        return;
      }
      for (std::uint32_t a = 0; a < model.states()[decision[k]].actions.size(); ++a) {
        policy.choice[decision[k]] = a;
        rec(k + 1);
      }
    };
    rec(0);
    const auto expected = any_unbounded  ? Boundedness::kUnboundedLtv
                          : any_immortal ? Boundedness::kZeroValueImmortal
                                         : Boundedness::kBounded;
    const auto got = check_boundedness(model);
    EXPECT_EQ(got, expected) << "seed " << seed;
    ++seen[got];
  }
  // The generator should exercise all three outcomes.
  EXPECT_EQ(seen.size(), 3u);
}

}  // namespace
}  // namespace ltv
