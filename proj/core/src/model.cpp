#include "ltv/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "ltv/error.hpp"

namespace ltv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUnknownFamily: return "UnknownFamily";
    case ErrorCode::kInvalidParameters: return "InvalidParameters";
    case ErrorCode::kInvalidPolicy: return "InvalidPolicy";
    case ErrorCode::kInvalidStats: return "InvalidStats";
    case ErrorCode::kUnboundedModel: return "UnboundedModel";
    case ErrorCode::kUnboundedLtv: return "UnboundedLtv";
    case ErrorCode::kBracketOverflow: return "BracketOverflow";
    case ErrorCode::kTooManyPolicies: return "TooManyPolicies";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

std::string_view to_string(Boundedness b) noexcept {
  switch (b) {
    case Boundedness::kBounded: return "Bounded";
    case Boundedness::kUnboundedLtv: return "UnboundedLtv";
    case Boundedness::kZeroValueImmortal: return "ZeroValueImmortal";
  }
  return "Unknown";
}

DagModel::DagModel(std::vector<StateSpec> states, StateId init, StateId loss, StateId survive,
                   double r_max)
    : states_(std::move(states)), init_(init), loss_(loss), survive_(survive), r_max_(r_max) {}

std::size_t DagModel::transition_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : states_)
    for (const auto& a : s.actions) n += a.transitions.size();
  return n;
}

bool operator==(const Transition& a, const Transition& b) {
  return a.target == b.target && a.probability == b.probability && a.reward == b.reward;
}
bool operator==(const ActionSpec& a, const ActionSpec& b) {
  return a.label == b.label && a.transitions == b.transitions;
}
bool operator==(const StateSpec& a, const StateSpec& b) {
  return a.label == b.label && a.actions == b.actions;
}
bool operator==(const DagModel& a, const DagModel& b) {
  return a.states_ == b.states_ && a.init_ == b.init_ && a.loss_ == b.loss_ &&
         a.survive_ == b.survive_ && a.r_max_ == b.r_max_;
}

bool ValidationReport::has(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.rule;
    if (v.where.state) {
      os << " at state " << v.where.state->index;
      if (v.where.action) os << " action " << *v.where.action;
    }
    os << ": " << v.message << '\n';
  }
  return os.str();
}

namespace {

// Kahn's algorithm on out-degree restricted to non-terminal states. Emits
// sinks first (smallest index first among ready states). The returned list
// excludes terminals; it is shorter than the non-terminal count iff a cycle
// exists.
std::vector<StateId> reverse_kahn(const DagModel& model) {
  const std::size_t n = model.size();
  std::vector<std::size_t> out_degree(n, 0);
  std::vector<std::vector<std::uint32_t>> predecessors(n);
  std::size_t non_terminal = 0;
  for (std::uint32_t u = 0; u < n; ++u) {
    if (model.is_terminal(StateId{u})) continue;
    ++non_terminal;
    for (const auto& a : model.states()[u].actions) {
      for (const auto& t : a.transitions) {
        if (t.target.index >= n || model.is_terminal(t.target)) continue;
        ++out_degree[u];
        predecessors[t.target.index].push_back(u);
      }
    }
  }
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> ready;
  for (std::uint32_t u = 0; u < n; ++u)
    if (!model.is_terminal(StateId{u}) && out_degree[u] == 0) ready.push(u);

  std::vector<StateId> order;
  order.reserve(non_terminal);
  while (!ready.empty()) {
    const std::uint32_t v = ready.top();
    ready.pop();
    order.push_back(StateId{v});
    for (std::uint32_t u : predecessors[v])
      if (--out_degree[u] == 0) ready.push(u);
  }
  return order;
}

void add(ValidationReport& report, std::string rule, ViolationLocation where, std::string msg) {
  report.violations.push_back({std::move(rule), where, std::move(msg)});
}

}  // namespace

ValidationReport validate_model(const DagModel& model) {
  ValidationReport report;
  const std::size_t n = model.size();
  const auto in_range = [n](StateId s) { return s.index < n; };

  if (!in_range(model.init()) || !in_range(model.loss()) || !in_range(model.survive())) {
    add(report, "terminal-index", {}, "init, loss and survive must index existing states");
    return report;
  }
  if (model.init() == model.loss() || model.init() == model.survive() ||
      model.loss() == model.survive()) {
    add(report, "terminal-distinct", {}, "init, loss and survive must be three distinct states");
  }
  if (!(model.r_max() >= 0.0) || !std::isfinite(model.r_max())) {
    add(report, "r-max", {}, "r_max must be a finite non-negative number");
  }

  std::unordered_set<std::string> labels;
  for (std::uint32_t i = 0; i < n; ++i) {
    const StateId id{i};
    const auto& state = model.states()[i];
    if (!labels.insert(state.label).second) {
      add(report, "label-unique", {id, {}}, "duplicate state label '" + state.label + "'");
    }
    if (model.is_terminal(id)) {
      if (!state.actions.empty())
        add(report, "terminal-actions", {id, {}}, "loss/survive states must have no actions");
      continue;
    }
    if (state.actions.empty()) {
      add(report, "no-actions", {id, {}}, "non-terminal state has no actions");
      continue;
    }
    for (std::size_t a = 0; a < state.actions.size(); ++a) {
      const auto& action = state.actions[a];
      double sum = 0.0;
      for (const auto& t : action.transitions) {
        if (!in_range(t.target)) {
          add(report, "target-range", {id, a},
              "transition target " + std::to_string(t.target.index) + " out of range");
        }
        if (t.probability == 0.0) {
          add(report, "zero-probability", {id, a}, "zero-probability transitions must be omitted");
        } else if (!(t.probability > 0.0 && t.probability <= 1.0)) {
          add(report, "probability-range", {id, a}, "transition probability outside (0, 1]");
        }
        if (!(t.reward >= 0.0)) {
          add(report, "negative-reward", {id, a}, "transition reward must be non-negative");
        } else if (t.reward > model.r_max()) {
          add(report, "reward-bound", {id, a}, "transition reward exceeds r_max");
        }
        sum += t.probability;
      }
      if (!(std::abs(sum - 1.0) <= kProbabilitySumTolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << "transition probabilities sum to " << sum;
        add(report, "probability-sum", {id, a}, os.str());
      }
    }
  }
  if (report.has("target-range") || report.has("terminal-distinct")) return report;

  std::size_t non_terminal = 0;
  for (std::uint32_t i = 0; i < n; ++i) non_terminal += model.is_terminal(StateId{i}) ? 0 : 1;
  const auto order = reverse_kahn(model);
  if (order.size() != non_terminal) {
    std::vector<bool> done(n, false);
    for (auto s : order) done[s.index] = true;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!done[i] && !model.is_terminal(StateId{i})) {
        add(report, "acyclic", {StateId{i}, {}},
            std::to_string(non_terminal - order.size()) +
                " state(s) lie on or lead into a cycle");
        break;
      }
    }
  }

  // Forward reachability from init.
  std::vector<bool> seen(n, false);
  std::vector<std::uint32_t> stack{model.init().index};
  seen[model.init().index] = true;
  std::vector<std::vector<std::uint32_t>> predecessors(n);
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (const auto& a : model.states()[u].actions)
      for (const auto& t : a.transitions)
        if (!seen[t.target.index]) {
          seen[t.target.index] = true;
          stack.push_back(t.target.index);
        }
  }
  for (std::uint32_t i = 0; i < n; ++i)
    if (!seen[i] && !model.is_terminal(StateId{i}))
      add(report, "reachable-from-init", {StateId{i}, {}}, "state unreachable from init");

  // Backward reachability from the two terminals.
  for (std::uint32_t u = 0; u < n; ++u)
    for (const auto& a : model.states()[u].actions)
      for (const auto& t : a.transitions) predecessors[t.target.index].push_back(u);
  std::fill(seen.begin(), seen.end(), false);
  stack = {model.loss().index, model.survive().index};
  seen[model.loss().index] = seen[model.survive().index] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto u : predecessors[v])
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
  }
  for (std::uint32_t i = 0; i < n; ++i)
    if (!seen[i])
      add(report, "reaches-terminal", {StateId{i}, {}}, "neither loss nor survive is reachable");

  return report;
}

void require_valid(const DagModel& model) {
  const auto report = validate_model(model);
  if (!report.ok()) throw Error(ErrorCode::kInvalidModel, report.summary());
}

std::vector<StateId> topological_order(const DagModel& model) {
  std::size_t non_terminal = 0;
  for (std::uint32_t i = 0; i < model.size(); ++i)
    non_terminal += model.is_terminal(StateId{i}) ? 0 : 1;
  auto inner = reverse_kahn(model);
  if (inner.size() != non_terminal)
    throw Error(ErrorCode::kCycleDetected, "non-terminal transition graph has a cycle");
  std::vector<StateId> order;
  order.reserve(inner.size() + 2);
  order.push_back(model.survive());
  order.push_back(model.loss());
  order.insert(order.end(), inner.begin(), inner.end());
  return order;
}

Boundedness check_boundedness(const DagModel& model) {
  const auto order = topological_order(model);
  const std::size_t n = model.size();
  constexpr double kUnset = -std::numeric_limits<double>::infinity();

  // certain[s]: some strategy from s reaches survive with probability one.
  // best[s]: the largest one-round reward among such strategies.
  std::vector<bool> certain(n, false);
  std::vector<double> best(n, kUnset);
  certain[model.survive().index] = true;
  best[model.survive().index] = 0.0;

  for (auto s : order) {
    if (model.is_terminal(s)) continue;
    for (const auto& action : model.state(s).actions) {
      bool all_certain = true;
      double value = 0.0;
      for (const auto& t : action.transitions) {
        if (!certain[t.target.index]) {
          all_certain = false;
          break;
        }
        value += t.probability * (t.reward + best[t.target.index]);
      }
      if (!all_certain) continue;
      certain[s.index] = true;
      best[s.index] = std::max(best[s.index], value);
    }
  }
  if (!certain[model.init().index]) return Boundedness::kBounded;
  return best[model.init().index] > 0.0 ? Boundedness::kUnboundedLtv
                                        : Boundedness::kZeroValueImmortal;
}

}  // namespace ltv
