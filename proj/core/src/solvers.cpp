#include "ltv/solvers.hpp"

#include <cmath>
#include <limits>

#include "ltv/error.hpp"

namespace ltv {

std::string_view to_string(BisectionBranch b) noexcept {
  switch (b) {
    case BisectionBranch::kFixedPoint: return "fixed-point";
    case BisectionBranch::kRatioAtMostGuess: return "ratio-at-most-guess";
  }
  return "unknown";
}

std::string_view to_string(BracketStep::Kind k) noexcept {
  switch (k) {
    case BracketStep::Kind::kExpand: return "expand";
    case BracketStep::Kind::kLeft: return "left";
    case BracketStep::Kind::kRight: return "right";
  }
  return "unknown";
}

void check_policy(const DagModel& model, const Policy& policy) {
  if (policy.choice.size() != model.size()) {
    throw Error(ErrorCode::kInvalidPolicy, "policy covers " + std::to_string(policy.choice.size()) +
                                               " states, model has " + std::to_string(model.size()));
  }
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    const StateId s{i};
    if (model.is_terminal(s)) continue;
    if (policy.choice[i] >= model.state(s).actions.size()) {
      throw Error(ErrorCode::kInvalidPolicy, "action " + std::to_string(policy.choice[i]) +
                                                 " out of range at state '" +
                                                 model.state(s).label + "'");
    }
  }
}

namespace {

// Backward induction over a precomputed reverse topological order. `score`
// maps an action to its value given the already-final successor values; the
// state adopts the first action with the strictly largest score.
template <typename Score>
Policy backward_argmax(const DagModel& model, const std::vector<StateId>& order,
                       std::vector<double>& value, Score&& score) {
  Policy policy{std::vector<std::uint32_t>(model.size(), 0)};
  for (auto s : order) {
    if (model.is_terminal(s)) continue;
    const auto& actions = model.state(s).actions;
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t a = 0; a < actions.size(); ++a) {
      const double v = score(actions[a]);
      if (v > best) {
        best = v;
        policy.choice[s.index] = a;
      }
    }
    value[s.index] = best;
  }
  return policy;
}

ValuedPolicy one_round(const DagModel& model, const std::vector<StateId>& order,
                       double survive_value) {
  std::vector<double> f(model.size(), 0.0);
  f[model.survive().index] = survive_value;
  f[model.loss().index] = 0.0;
  auto policy = backward_argmax(model, order, f, [&](const ActionSpec& action) {
    double v = 0.0;
    for (const auto& t : action.transitions) v += t.probability * (t.reward + f[t.target.index]);
    return v;
  });
  return {f[model.init().index], std::move(policy)};
}

// Reusable storage for repeated dp passes over the same model.
class PairPass {
 public:
  PairPass(const DagModel& model, std::vector<StateId> order)
      : model_(model), order_(std::move(order)), pairs_(model.size()),
        choice_(model.size(), 0) {}

  const ValuePair& run(double g) {
    pairs_[model_.survive().index] = {1.0, 0.0};
    pairs_[model_.loss().index] = {0.0, 0.0};
    for (auto s : order_) {
      if (model_.is_terminal(s)) continue;
      const auto& actions = model_.state(s).actions;
      ValuePair best;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::uint32_t a = 0; a < actions.size(); ++a) {
        ValuePair candidate;
        for (const auto& t : actions[a].transitions) {
          const ValuePair& next = pairs_[t.target.index];
          candidate.p += t.probability * next.p;
          candidate.r += t.probability * (t.reward + next.r);
        }
        const double score = candidate.at(g);
        if (score > best_score) {
          best_score = score;
          best = candidate;
          choice_[s.index] = a;
        }
      }
      pairs_[s.index] = best;
    }
    return pairs_[model_.init().index];
  }

  Policy policy() const { return Policy{choice_}; }
  const std::vector<ValuePair>& pairs() const noexcept { return pairs_; }

 private:
  const DagModel& model_;
  std::vector<StateId> order_;
  std::vector<ValuePair> pairs_;
  std::vector<std::uint32_t> choice_;
};

double ratio(const ValuePair& pair) {
  if (pair.p < 1.0) return pair.r / (1.0 - pair.p);
  return pair.r > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

Policy solve_greedy(const DagModel& model, GreedyMode mode) {
  const auto order = topological_order(model);
  std::vector<double> v(model.size(), 0.0);
  if (mode == GreedyMode::kDiscounted) {
    return backward_argmax(model, order, v, [&](const ActionSpec& action) {
      double score = 0.0;
      for (const auto& t : action.transitions) score += t.probability * (t.reward + v[t.target.index]);
      return score;
    });
  }
  const StateId loss = model.loss();
  return backward_argmax(model, order, v, [&](const ActionSpec& action) {
    double mass = 0.0, score = 0.0;
    for (const auto& t : action.transitions) {
      if (t.target == loss) continue;
      mass += t.probability;
      score += t.probability * (t.reward + v[t.target.index]);
    }
    return mass > 0.0 ? score / mass : 0.0;
  });
}

ValuedPolicy solve_bf_one_round(const DagModel& model) {
  return one_round(model, topological_order(model), 0.0);
}

ValuedPolicy solve_bf_unrolled(const DagModel& model, std::size_t k_days) {
  if (k_days == 0) throw Error(ErrorCode::kInvalidConfig, "k_days must be at least 1");
  const auto order = topological_order(model);
  ValuedPolicy result;
  double remaining = 0.0;  // optimal value of the rounds after this one
  for (std::size_t k = 0; k < k_days; ++k) {
    result = one_round(model, order, remaining);
    remaining = result.value;
  }
  return result;
}

DpPassResult dp_pass(const DagModel& model, double g) {
  PairPass pass(model, topological_order(model));
  DpPassResult out;
  out.init = pass.run(g);
  out.policy = pass.policy();
  out.per_state = pass.pairs();
  out.g = g;
  return out;
}

MreoptResult solve_mreopt(const DagModel& model, const MreoptOptions& options) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::kInvalidConfig, "epsilon must be positive");
  if (check_boundedness(model) == Boundedness::kUnboundedLtv) {
    throw Error(ErrorCode::kUnboundedModel,
                "a strategy survives every round with certainty and earns positive reward");
  }

  PairPass pass(model, topological_order(model));
  MreoptResult result;
  double left = 0.0, right = 1.0;

  // No a-priori upper bound on the life-time value: double until F(right) <= right.
  const double cap =
      std::ldexp(1.0, 40) * std::max(model.r_max(), 0.0) * static_cast<double>(model.size());
  while (pass.run(right).at(right) > right) {
    result.bracket_trace.push_back({left, right, right, BracketStep::Kind::kExpand});
    ++result.iterations;
    right *= 2.0;
    if (right > cap) {
      throw Error(ErrorCode::kBracketOverflow,
                  "upper bracket exceeded 2^40 * r_max * N_s; the model is likely unbounded");
    }
  }

  // The printed form of this update, "left <- g if r/(1-p) <= g", moves the
  // bracket away from the answer: on a single state with pair (0.95, 0.38) the
  // ratio is 7.6 > g = 1, so it would set right = 1. F(g) > g means the fixed
  // point lies above g.
  while (right - left > options.epsilon) {
    const double g = left + 0.5 * (right - left);
    const ValuePair& pair = pass.run(g);
    bool go_left;
    if (options.branch == BisectionBranch::kFixedPoint) {
      go_left = pair.at(g) > g;
    } else {
      go_left = ratio(pair) <= g;
    }
    if (go_left) {
      left = g;
    } else {
      right = g;
    }
    ++result.iterations;
    result.bracket_trace.push_back(
        {left, right, g, go_left ? BracketStep::Kind::kLeft : BracketStep::Kind::kRight});
  }

  result.ltv = left;
  result.pair = pass.run(left);
  result.policy = pass.policy();
  result.policy_ltv = ratio(result.pair);
  return result;
}

}  // namespace ltv
