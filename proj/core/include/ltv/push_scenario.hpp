#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltv/model.hpp"

namespace ltv {

/// Named parametric family used to synthesize click/close probabilities.
///
///   constant      q0, c0
///   fatigue       q0, c0, beta, gamma
///   random-table  q_hi, c_lo, c_hi
struct FamilySpec {
  std::string name;
  std::map<std::string, double> params;
};

/// Click and close probabilities per (slot t, pushes already sent m), stored as
/// dense lambda x m_max tables in row-major (t-major) order.
class ProbModel {
 public:
  ProbModel() = default;
  /// Throws Error(kInvalidConfig) on dimension mismatch or out-of-range
  /// probabilities: click must lie in [0, 1), close in (0, 1].
  ProbModel(std::size_t lambda, std::size_t m_max, std::vector<double> click,
            std::vector<double> close);

  std::size_t lambda() const noexcept { return lambda_; }
  std::size_t m_max() const noexcept { return m_max_; }

  double click(std::size_t t, std::size_t m) const { return click_.at(t * m_max_ + m); }
  double close(std::size_t t, std::size_t m) const { return close_.at(t * m_max_ + m); }

  const std::vector<double>& click_table() const noexcept { return click_; }
  const std::vector<double>& close_table() const noexcept { return close_; }

  /// Set when the tables came from synth_prob_model.
  const std::optional<FamilySpec>& family() const noexcept { return family_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void set_origin(FamilySpec family, std::uint64_t seed) {
    family_ = std::move(family);
    seed_ = seed;
  }

 private:
  std::size_t lambda_ = 0;
  std::size_t m_max_ = 0;
  std::vector<double> click_;
  std::vector<double> close_;
  std::optional<FamilySpec> family_;
  std::uint64_t seed_ = 0;
};

struct PushScenarioConfig {
  std::size_t lambda = 0;  // candidate sending slots per day
  std::size_t m_max = 0;   // daily send cap, 1 <= m_max <= lambda
  ProbModel prob_model;
};

/// Relative engagement over the day: two Gaussian bumps at 30% and 75% of the
/// day (width 12%), evaluated at slot midpoints and scaled so the busiest slot
/// is exactly 1.
std::vector<double> daypart_profile(std::size_t lambda);

/// Deterministic in (family, lambda, m_max, seed). Throws
/// Error(kUnknownFamily) or Error(kInvalidParameters).
ProbModel synth_prob_model(const FamilySpec& family, std::size_t lambda, std::size_t m_max,
                           std::uint64_t seed);

/// Number of states build_push_dag produces, terminals included, when every
/// close probability is below 1.
std::size_t push_state_count(std::size_t lambda, std::size_t m_max) noexcept;

/// Label of grid state (t, m), e.g. "(3,1)".
std::string grid_label(std::size_t t, std::size_t m);

/// Builds the daily push-sending DAG over grid states (t, m) with
/// 0 <= t <= lambda, 0 <= m <= min(t, m_max); init is (0, 0).
///
/// At (t, m) with t < lambda:
///   send (only if m < m_max):  loss w.p. close(t,m);
///                              (t+1, m+1) w.p. 1-close(t,m), reward click(t,m)
///   skip:                      (t+1, m) w.p. 1, reward 0
/// At (lambda, m): end-day -> survive w.p. 1.
///
/// Grid states are numbered t-major then by m, followed by loss and survive.
/// Cells left unreachable by a certain close are dropped. Throws Error(kInvalidConfig).
DagModel build_push_dag(const PushScenarioConfig& config);

}  // namespace ltv
