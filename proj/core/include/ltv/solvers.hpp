#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ltv/model.hpp"

namespace ltv {

/// Deterministic stationary strategy. choice[s] indexes the action list of
/// state s; entries for the loss and survive states are ignored.
struct Policy {
  std::vector<std::uint32_t> choice;

  std::uint32_t operator[](StateId s) const { return choice.at(s.index); }
  friend bool operator==(const Policy&, const Policy&) = default;
};

/// Throws Error(kInvalidPolicy) unless `policy` covers every state of `model`
/// with an in-range action index.
void check_policy(const DagModel& model, const Policy& policy);

/// Survival probability and expected one-round reward from a state.
struct ValuePair {
  double p = 0.0;
  double r = 0.0;

  /// Scalarization against a guessed life-time value g.
  double at(double g) const noexcept { return p * g + r; }
  friend bool operator==(const ValuePair&, const ValuePair&) = default;
};

enum class GreedyMode {
  kConditional,  // clicks conditional on survival; loss never discounts
  kDiscounted,   // clicks weighted by path probability (loss contributes 0)
};

/// Greedy baseline: maximizes expected clicks along the round while ignoring
/// the risk of losing the customer. Ties go to the lowest action index.
Policy solve_greedy(const DagModel& model, GreedyMode mode = GreedyMode::kConditional);

struct ValuedPolicy {
  double value = 0.0;
  Policy policy;
};

/// Exact optimum of a single round, f(loss) = f(survive) = 0.
ValuedPolicy solve_bf_one_round(const DagModel& model);

/// Optimal expected reward over `k_days` chained rounds. The returned policy
/// is the one to use on the first of those rounds.
ValuedPolicy solve_bf_unrolled(const DagModel& model, std::size_t k_days);

struct DpPassResult {
  ValuePair init;
  Policy policy;
  std::vector<ValuePair> per_state;
  double g = 0.0;

  /// F(g) = p * g + r at init.
  double value() const noexcept { return init.at(g); }
};

/// One backward pass with anchors (1, 0) at survive and (0, 0) at loss. Each
/// state keeps the action whose (p, r) maximizes p * g + r.
DpPassResult dp_pass(const DagModel& model, double g);

enum class BisectionBranch {
  /// left <- g iff F(g) > g. Converges to the fixed point F(g*) = g*.
  kFixedPoint,
  /// left <- g iff r/(1-p) <= g at the adopted pair. Kept only so the
  /// regression suite can show that it walks away from the fixed point.
  kRatioAtMostGuess,
};

std::string_view to_string(BisectionBranch b) noexcept;

struct MreoptOptions {
  double epsilon = 1e-6;
  BisectionBranch branch = BisectionBranch::kFixedPoint;
};

struct BracketStep {
  enum class Kind { kExpand, kLeft, kRight };

  double left = 0.0;
  double right = 0.0;
  double g = 0.0;
  Kind kind = Kind::kExpand;

  friend bool operator==(const BracketStep&, const BracketStep&) = default;
};

std::string_view to_string(BracketStep::Kind k) noexcept;

struct MreoptResult {
  double ltv = 0.0;         // final left end of the bracket
  Policy policy;            // dp_pass argmax at g = ltv
  ValuePair pair;           // (p, r) of that policy at init
  double policy_ltv = 0.0;  // r / (1 - p) of that policy, 0 if immortal
  std::size_t iterations = 0;
  std::vector<BracketStep> bracket_trace;
};

/// Maximizes life-time value under memoryless repeated rounds: finds the fixed
/// point of F(g) by bisection, scoring each guess with dp_pass.
///
/// Throws Error(kUnboundedModel) when check_boundedness reports UnboundedLtv,
/// Error(kBracketOverflow) if the upper bracket cannot be found.
MreoptResult solve_mreopt(const DagModel& model, const MreoptOptions& options = {});

}  // namespace ltv
