#include "ltv/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include "ltv/error.hpp"
#include "ltv/random.hpp"

namespace ltv {

bool is_send_action(const ActionSpec& action) noexcept {
  if (action.label == "send") return true;
  return std::any_of(action.transitions.begin(), action.transitions.end(),
                     [](const Transition& t) { return t.reward > 0.0; });
}

RoundStats evaluate_policy(const DagModel& model, const Policy& policy) {
  check_policy(model, policy);
  const auto order = topological_order(model);
  std::vector<RoundStats> stats(model.size());
  stats[model.survive().index] = {1.0, 0.0, 0.0};
  stats[model.loss().index] = {0.0, 0.0, 0.0};
  for (auto s : order) {
    if (model.is_terminal(s)) continue;
    const auto& action = model.state(s).actions[policy[s]];
    RoundStats acc{0.0, 0.0, is_send_action(action) ? 1.0 : 0.0};
    for (const auto& t : action.transitions) {
      const auto& next = stats[t.target.index];
      acc.p += t.probability * next.p;
      acc.r += t.probability * (t.reward + next.r);
      acc.l += t.probability * next.l;
    }
    stats[s.index] = acc;
  }
  return stats[model.init().index];
}

MetricsReport metrics(const RoundStats& stats) {
  if (stats.p >= 1.0) {
    if (stats.r > 0.0) {
      throw Error(ErrorCode::kUnboundedLtv, "survival probability 1 with positive reward");
    }
    return {0.0, std::numeric_limits<double>::infinity(), 0.0, true};
  }
  if (stats.l <= 0.0 && stats.r > 0.0) {
    throw Error(ErrorCode::kInvalidStats, "positive reward with no sends");
  }
  const double survive_rounds = 1.0 / (1.0 - stats.p);
  MetricsReport out;
  out.ltv = stats.r * survive_rounds;
  out.lt = stats.l * survive_rounds;
  out.ctr = stats.l > 0.0 ? stats.r / stats.l : 0.0;
  return out;
}

std::uint64_t policy_count(const DagModel& model) noexcept {
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    if (model.is_terminal(StateId{i})) continue;
    const std::uint64_t k = model.states()[i].actions.size();
    if (k == 0) continue;
    if (count > std::numeric_limits<std::uint64_t>::max() / k)
      return std::numeric_limits<std::uint64_t>::max();
    count *= k;
  }
  return count;
}

OracleResult enumerate_oracle(const DagModel& model, bool keep_table) {
  const auto count = policy_count(model);
  if (count > kMaxEnumeratedPolicies) {
    throw Error(ErrorCode::kTooManyPolicies,
                std::to_string(count) + " policies exceed the cap of " +
                    std::to_string(kMaxEnumeratedPolicies));
  }
  std::vector<std::uint32_t> decision;
  for (std::uint32_t i = 0; i < model.size(); ++i)
    if (!model.is_terminal(StateId{i})) decision.push_back(i);

  OracleResult result;
  Policy policy{std::vector<std::uint32_t>(model.size(), 0)};
  bool first = true;
  while (true) {
    const auto report = metrics(evaluate_policy(model, policy));
    if (first || report.ltv > result.best_ltv) {
      result.best_ltv = report.ltv;
      result.best_policy = policy;
      first = false;
    }
    if (keep_table) result.table.push_back({policy, report});

    // Odometer increment, last decision state fastest.
    std::size_t k = decision.size();
    while (k > 0) {
      auto& digit = policy.choice[decision[k - 1]];
      if (++digit < model.states()[decision[k - 1]].actions.size()) break;
      digit = 0;
      --k;
    }
    if (k == 0) break;
  }
  return result;
}

namespace {

struct EpisodeOutcome {
  double clicks = 0.0;
  double sends = 0.0;
  std::size_t rounds = 0;
  bool truncated = false;
};

struct CompiledAction {
  std::vector<double> cumulative;
  std::vector<const Transition*> transitions;
  bool send = false;
};

EpisodeOutcome run_episode(const DagModel& model, const std::vector<CompiledAction>& plan,
                           const SimOptions& options, std::uint64_t episode) {
  SplitMix64 rng(substream_seed(options.seed, episode));
  EpisodeOutcome out;
  StateId s = model.init();
  while (true) {
    if (s == model.loss()) {
      ++out.rounds;
      break;
    }
    if (s == model.survive()) {
      if (++out.rounds == options.max_rounds) {
        out.truncated = true;
        break;
      }
      s = model.init();
      continue;
    }
    const auto& action = plan[s.index];
    if (action.send) out.sends += 1.0;
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < action.cumulative.size() && u >= action.cumulative[k]) ++k;
    const Transition& t = *action.transitions[k];
    if (t.reward > 0.0) {
      if (options.mode == SimMode::kExpected) {
        out.clicks += t.reward;
      } else if (rng.uniform() < std::min(t.reward, 1.0)) {
        out.clicks += 1.0;
      }
    }
    s = t.target;
  }
  return out;
}

}  // namespace

SimReport simulate_online(const DagModel& model, const Policy& policy, const SimOptions& options) {
  check_policy(model, policy);
  if (options.max_rounds < 1) throw Error(ErrorCode::kInvalidConfig, "max_rounds must be >= 1");
  if (options.mode == SimMode::kClick && model.r_max() > 1.0) {
    throw Error(ErrorCode::kModeMismatch, "click simulation needs r_max <= 1");
  }

  std::vector<CompiledAction> plan(model.size());
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    const StateId s{i};
    if (model.is_terminal(s)) continue;
    const auto& action = model.state(s).actions[policy[s]];
    auto& compiled = plan[i];
    compiled.send = is_send_action(action);
    double acc = 0.0;
    for (const auto& t : action.transitions) {
      acc += t.probability;
      compiled.cumulative.push_back(acc);
      compiled.transitions.push_back(&t);
    }
  }

  const std::size_t n = options.n_episodes;
  std::vector<EpisodeOutcome> outcomes(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, n == 0 ? 1 : n));
  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) outcomes[i] = run_episode(model, plan, options, i);
  };
  if (workers == 1) {
    run_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, w * chunk), end = std::min(n, begin + chunk);
      pool.emplace_back(run_range, begin, end);
    }
  }

  SimReport report;
  report.n_episodes = n;
  if (n == 0) return report;
  double sum_ltv = 0.0, sum_lt = 0.0, sum_rounds = 0.0;
  std::size_t truncated = 0;
  for (const auto& o : outcomes) {
    sum_ltv += o.clicks;
    sum_lt += o.sends;
    sum_rounds += static_cast<double>(o.rounds);
    truncated += o.truncated ? 1 : 0;
  }
  const double dn = static_cast<double>(n);
  report.mean_ltv = sum_ltv / dn;
  report.mean_lt = sum_lt / dn;
  report.mean_rounds = sum_rounds / dn;
  report.truncated_fraction = static_cast<double>(truncated) / dn;
  if (n > 1) {
    double ss_ltv = 0.0, ss_lt = 0.0;
    for (const auto& o : outcomes) {
      ss_ltv += (o.clicks - report.mean_ltv) * (o.clicks - report.mean_ltv);
      ss_lt += (o.sends - report.mean_lt) * (o.sends - report.mean_lt);
    }
    report.stderr_ltv = std::sqrt(ss_ltv / (dn - 1.0)) / std::sqrt(dn);
    report.stderr_lt = std::sqrt(ss_lt / (dn - 1.0)) / std::sqrt(dn);
  }
  return report;
}

std::vector<ComparisonRow> compare(std::span<const NamedModel> models,
                                   const CompareOptions& options) {
  std::vector<ComparisonRow> rows;
  rows.reserve(models.size() * 3);
  for (const auto& named : models) {
    const auto& model = named.model;
    const auto score = [&](const Policy& policy) { return metrics(evaluate_policy(model, policy)); };
    rows.push_back({named.id, "Greedy", score(solve_greedy(model, options.greedy_mode))});
    rows.push_back({named.id, "BF", score(solve_bf_one_round(model).policy)});
    rows.push_back({named.id, "MREOpt", score(solve_mreopt(model, {options.epsilon}).policy)});
  }
  return rows;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void write_comparison_csv(std::ostream& os, std::span<const ComparisonRow> rows) {
  os << "model_id,method,ltv,lt,ctr\n";
  for (const auto& row : rows) {
    os << row.model_id << ',' << row.method << ',' << format_number(row.report.ltv) << ','
       << format_number(row.report.lt) << ',' << format_number(row.report.ctr) << '\n';
  }
}

void write_comparison_text(std::ostream& os, std::span<const ComparisonRow> rows) {
  const std::string* current = nullptr;
  for (const auto& row : rows) {
    if (current == nullptr || *current != row.model_id) {
      if (current != nullptr) os << '\n';
      current = &row.model_id;
      os << "model " << row.model_id << '\n';
      os << std::left << std::setw(8) << "Method" << std::right << std::setw(14) << "LTV"
         << std::setw(14) << "LT" << std::setw(14) << "CTR" << '\n';
    }
    os << std::left << std::setw(8) << row.method << std::right << std::setw(14)
       << format_number(row.report.ltv) << std::setw(14) << format_number(row.report.lt)
       << std::setw(14) << format_number(row.report.ctr) << '\n';
  }
}

}  // namespace ltv
