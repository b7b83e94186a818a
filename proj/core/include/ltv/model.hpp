#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ltv {

/// Dense index of a state inside a DagModel.
struct StateId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(StateId, StateId) = default;
};

struct Transition {
  StateId target;
  double probability = 0.0;
  double reward = 0.0;
};

struct ActionSpec {
  std::string label;
  std::vector<Transition> transitions;
};

struct StateSpec {
  std::string label;
  std::vector<ActionSpec> actions;
};

/// A single round of customer interaction: a DAG over decision states that
/// ends either in `loss` (customer gone) or `survive` (round complete, the
/// customer restarts at `init` next round).
///
/// The model is an immutable value. Construction never validates; use
/// validate_model() before handing an untrusted model to a solver.
class DagModel {
 public:
  DagModel() = default;
  DagModel(std::vector<StateSpec> states, StateId init, StateId loss, StateId survive,
           double r_max);

  const std::vector<StateSpec>& states() const noexcept { return states_; }
  const StateSpec& state(StateId id) const { return states_.at(id.index); }
  std::size_t size() const noexcept { return states_.size(); }

  StateId init() const noexcept { return init_; }
  StateId loss() const noexcept { return loss_; }
  StateId survive() const noexcept { return survive_; }
  double r_max() const noexcept { return r_max_; }

  bool is_terminal(StateId id) const noexcept { return id == loss_ || id == survive_; }

  /// Number of edges over all actions.
  std::size_t transition_count() const noexcept;

  friend bool operator==(const DagModel&, const DagModel&);

 private:
  std::vector<StateSpec> states_;
  StateId init_{};
  StateId loss_{};
  StateId survive_{};
  double r_max_ = 1.0;
};

bool operator==(const Transition&, const Transition&);
bool operator==(const ActionSpec&, const ActionSpec&);
bool operator==(const StateSpec&, const StateSpec&);

inline constexpr double kProbabilitySumTolerance = 1e-9;

struct ViolationLocation {
  std::optional<StateId> state;
  std::optional<std::size_t> action;
};

struct Violation {
  std::string rule;
  ViolationLocation where;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view rule) const;
  std::string summary() const;
};

/// Checks every structural rule a solver relies on. Violations are returned as
/// data; this never throws.
///
/// Rule names: terminal-index, terminal-distinct, terminal-actions, r-max,
/// no-actions, label-unique, target-range, zero-probability,
/// probability-range, negative-reward, reward-bound, probability-sum,
/// acyclic, reachable-from-init, reaches-terminal.
ValidationReport validate_model(const DagModel& model);

/// Throws Error(kInvalidModel) with the report summary when validation fails.
void require_valid(const DagModel& model);

/// Reverse topological order: [survive, loss, ..., init]. Every transition
/// u -> v between non-terminal states has v listed before u. Ties are broken by
/// ascending state index. Throws Error(kCycleDetected).
std::vector<StateId> topological_order(const DagModel& model);

enum class Boundedness {
  kBounded,
  kUnboundedLtv,
  kZeroValueImmortal,
};

std::string_view to_string(Boundedness b) noexcept;

/// Decides whether some strategy survives a round with probability exactly one.
/// Such a strategy earning positive reward has infinite life-time value.
Boundedness check_boundedness(const DagModel& model);

}  // namespace ltv
