#include "ltv/instance_generator.hpp"

#include <string>
#include <vector>

#include "ltv/error.hpp"
#include "ltv/random.hpp"

namespace ltv {

namespace {

struct DraftEdge {
  std::uint32_t target;
  double weight;
  double reward;
};

struct DraftAction {
  double loss_probability;
  double loss_reward;
  std::vector<DraftEdge> edges;  // non-loss outcomes, weights normalized later
};

}  // namespace

DagModel random_instance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.max_decision_states < 1 || spec.max_actions < 1) {
    throw Error(ErrorCode::kInvalidConfig, "instance spec needs at least one state and action");
  }
  if (!(spec.min_loss > 0.0 && spec.min_loss <= spec.max_loss && spec.max_loss < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "instance spec needs 0 < min_loss <= max_loss < 1");
  }
  SplitMix64 rng(seed);
  const auto n = static_cast<std::uint32_t>(1 + rng.below(spec.max_decision_states));
  const std::uint32_t loss = n, survive = n + 1;

  std::vector<std::vector<DraftAction>> draft(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto k = 1 + rng.below(spec.max_actions);
    for (std::uint64_t a = 0; a < k; ++a) {
      DraftAction action;
      action.loss_probability = rng.uniform(spec.min_loss, spec.max_loss);
      action.loss_reward = rng.uniform() < 0.25 ? rng.uniform(0.0, spec.max_reward) : 0.0;
      for (std::uint32_t j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) action.edges.push_back({j, rng.uniform(0.1, 1.0), rng.uniform(0.0, spec.max_reward)});
      if (action.edges.empty() || rng.uniform() < 0.6)
        action.edges.push_back({survive, rng.uniform(0.1, 1.0), rng.uniform(0.0, spec.max_reward)});
      draft[i].push_back(std::move(action));
    }
  }

  // Ensure every decision state has a predecessor.
  std::vector<bool> has_parent(n, false);
  for (std::uint32_t i = 0; i < n; ++i)
    for (const auto& action : draft[i])
      for (const auto& e : action.edges)
        if (e.target < n) has_parent[e.target] = true;
  for (std::uint32_t j = 1; j < n; ++j) {
    if (has_parent[j]) continue;
    const auto i = static_cast<std::uint32_t>(rng.below(j));
    auto& action = draft[i][rng.below(draft[i].size())];
    action.edges.push_back({j, rng.uniform(0.1, 1.0), rng.uniform(0.0, spec.max_reward)});
  }

  std::vector<StateSpec> states(n + 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    states[i].label = "s" + std::to_string(i);
    for (std::size_t a = 0; a < draft[i].size(); ++a) {
      const auto& d = draft[i][a];
      double total = 0.0;
      for (const auto& e : d.edges) total += e.weight;
      ActionSpec action{"a" + std::to_string(a), {}};
      for (const auto& e : d.edges)
        action.transitions.push_back({StateId{e.target}, (1.0 - d.loss_probability) * e.weight / total, e.reward});
      action.transitions.push_back({StateId{loss}, d.loss_probability, d.loss_reward});
      states[i].actions.push_back(std::move(action));
    }
  }
  states[loss].label = "loss";
  states[survive].label = "survive";
  return DagModel(std::move(states), StateId{0}, StateId{loss}, StateId{survive}, spec.max_reward);
}

}  // namespace ltv
