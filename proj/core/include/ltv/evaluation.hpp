#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ltv/model.hpp"
#include "ltv/solvers.hpp"

namespace ltv {

/// Per-round statistics of a fixed policy: survival probability, expected
/// clicks and expected sends.
struct RoundStats {
  double p = 0.0;
  double r = 0.0;
  double l = 0.0;
};

struct MetricsReport {
  double ltv = 0.0;
  double lt = 0.0;   // +inf when immortal
  double ctr = 0.0;
  bool immortal = false;
};

/// An action counts as a send if it is labeled "send" or if any of its
/// transitions carries positive reward.
bool is_send_action(const ActionSpec& action) noexcept;

/// Exact (p, r, l) of `policy` at init. Throws Error(kInvalidPolicy).
RoundStats evaluate_policy(const DagModel& model, const Policy& policy);

/// Infinite-horizon metrics under memoryless restarts:
/// ltv = r/(1-p), lt = l/(1-p), ctr = r/l (0 when l = 0).
/// p = 1 with r = 0 is the immortal zero-value case. Throws
/// Error(kUnboundedLtv) for p = 1 with r > 0.
MetricsReport metrics(const RoundStats& stats);

struct OracleRow {
  Policy policy;
  MetricsReport report;
};

struct OracleResult {
  double best_ltv = 0.0;
  Policy best_policy;
  std::vector<OracleRow> table;
};

inline constexpr std::uint64_t kMaxEnumeratedPolicies = 1'000'000;

/// Number of deterministic stationary policies, saturating at UINT64_MAX.
std::uint64_t policy_count(const DagModel& model) noexcept;

/// Evaluates every deterministic stationary policy. Policies are visited in
/// lexicographic order of their action-index vectors (ascending state index),
/// so the first maximizer wins ties. Throws Error(kTooManyPolicies).
OracleResult enumerate_oracle(const DagModel& model, bool keep_table = true);

enum class SimMode {
  kClick,     // Bernoulli(reward) click per rewarded edge; needs r_max <= 1
  kExpected,  // add the edge reward itself
};

struct SimOptions {
  std::size_t n_episodes = 10000;
  std::uint64_t seed = 0;
  std::size_t max_rounds = 10000;
  SimMode mode = SimMode::kExpected;
  unsigned threads = 1;
};

struct SimReport {
  std::size_t n_episodes = 0;
  double mean_ltv = 0.0;
  double mean_lt = 0.0;
  double stderr_ltv = 0.0;
  double stderr_lt = 0.0;
  double mean_rounds = 0.0;
  double truncated_fraction = 0.0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Monte Carlo of customers following `policy` round after round until they
/// are lost or `max_rounds` rounds complete. Episode i draws from substream
/// (seed, i), so the report does not depend on `threads`.
/// Throws Error(kModeMismatch) for click mode with r_max > 1.
SimReport simulate_online(const DagModel& model, const Policy& policy, const SimOptions& options);

struct NamedModel {
  std::string id;
  DagModel model;
};

struct ComparisonRow {
  std::string model_id;
  std::string method;  // Greedy, BF, MREOpt
  MetricsReport report;
};

struct CompareOptions {
  double epsilon = 1e-6;
  GreedyMode greedy_mode = GreedyMode::kConditional;
};

/// Greedy, one-round BF and MREOpt policies per model, each scored with the
/// same infinite-horizon metrics. Rows are in model order, then method order.
std::vector<ComparisonRow> compare(std::span<const NamedModel> models,
                                   const CompareOptions& options = {});

/// Columns: model_id,method,ltv,lt,ctr with six decimals.
void write_comparison_csv(std::ostream& os, std::span<const ComparisonRow> rows);
/// One aligned method x {LTV, LT, CTR} block per model.
void write_comparison_text(std::ostream& os, std::span<const ComparisonRow> rows);

/// Fixed six-decimal rendering; "inf" for infinities.
std::string format_number(double value);

}  // namespace ltv
