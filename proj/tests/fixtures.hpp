#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ltv/model.hpp"
#include "ltv/push_scenario.hpp"
#include "ltv/solvers.hpp"

namespace ltv::testing {

// Single decision state with two actions A and B. Ids: init 0, loss 1, survive 2.
inline DagModel two_action_model(double pa, double ra, double pb, double rb) {
  std::vector<StateSpec> states(3);
  states[0].label = "init";
  states[0].actions = {
      {"A", {{StateId{2}, pa, ra}, {StateId{1}, 1.0 - pa, 0.0}}},
      {"B", {{StateId{2}, pb, rb}, {StateId{1}, 1.0 - pb, 0.0}}},
  };
  states[1].label = "loss";
  states[2].label = "survive";
  return DagModel(std::move(states), StateId{0}, StateId{1}, StateId{2}, 1.0);
}

inline DagModel t1() { return two_action_model(0.5, 1.0, 0.9, 0.1); }
inline DagModel t2() { return two_action_model(0.5, 1.0, 0.95, 0.4); }

inline DagModel constant_push(std::size_t lambda, std::size_t m_max, double click, double close) {
  const FamilySpec family{"constant", {{"q0", click}, {"c0", close}}};
  return build_push_dag({lambda, m_max, synth_prob_model(family, lambda, m_max, 0)});
}

inline DagModel fatigue_push(std::size_t lambda, std::size_t m_max, std::uint64_t seed = 7) {
  const FamilySpec family{"fatigue", {{"q0", 0.35}, {"c0", 0.004}, {"beta", 0.9}, {"gamma", 1.25}}};
  return build_push_dag({lambda, m_max, synth_prob_model(family, lambda, m_max, seed)});
}

// Survival probability and one-round reward of a policy, by explicit path
// expansion from init. Exponential in depth; fine for desk-sized models.
struct PathTotals {
  double p = 0.0;
  double r = 0.0;
};

inline PathTotals expand_paths(const DagModel& model, const Policy& policy) {
  PathTotals totals;
  std::function<void(StateId, double, double)> walk = [&](StateId s, double mass, double earned) {
    if (s == model.survive()) {
      totals.p += mass;
      totals.r += mass * earned;
      return;
    }
    if (s == model.loss()) {
      totals.r += mass * earned;
      return;
    }
    for (const auto& t : model.state(s).actions[policy[s]].transitions)
      walk(t.target, mass * t.probability, earned + t.reward);
  };
  walk(model.init(), 1.0, 0.0);
  return totals;
}

// Best r/(1-p) over all deterministic policies, each scored by path expansion.
inline double brute_force_best_ltv(const DagModel& model) {
  std::vector<std::uint32_t> decision;
  for (std::uint32_t i = 0; i < model.size(); ++i)
    if (!model.is_terminal(StateId{i})) decision.push_back(i);
  Policy policy{std::vector<std::uint32_t>(model.size(), 0)};
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == decision.size()) {
      const auto totals = expand_paths(model, policy);
      const double value = totals.p >= 1.0 ? 0.0 : totals.r / (1.0 - totals.p);
      best = std::max(best, value);
      return;
    }
    const auto n = model.states()[decision[k]].actions.size();
    for (std::uint32_t a = 0; a < n; ++a) {
      policy.choice[decision[k]] = a;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace ltv::testing
