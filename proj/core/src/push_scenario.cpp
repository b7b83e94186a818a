#include "ltv/push_scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ltv/error.hpp"
#include "ltv/random.hpp"

namespace ltv {

ProbModel::ProbModel(std::size_t lambda, std::size_t m_max, std::vector<double> click,
                     std::vector<double> close)
    : lambda_(lambda), m_max_(m_max), click_(std::move(click)), close_(std::move(close)) {
  const std::size_t cells = lambda_ * m_max_;
  if (click_.size() != cells || close_.size() != cells) {
    throw Error(ErrorCode::kInvalidConfig, "probability tables must have lambda x m_max entries");
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(click_[i] >= 0.0 && click_[i] < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "click(" + std::to_string(i / m_max_) + "," + std::to_string(i % m_max_) +
                      ") must lie in [0, 1)");
    }
    if (!(close_[i] > 0.0 && close_[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "close(" + std::to_string(i / m_max_) + "," + std::to_string(i % m_max_) +
                      ") must lie in (0, 1]");
    }
  }
}

std::vector<double> daypart_profile(std::size_t lambda) {
  constexpr double kWidth = 0.12;
  const auto bump = [](double x, double centre) {
    const double z = (x - centre) / kWidth;
    return std::exp(-0.5 * z * z);
  };
  std::vector<double> profile(lambda);
  for (std::size_t t = 0; t < lambda; ++t) {
    const double x = (static_cast<double>(t) + 0.5) / static_cast<double>(lambda);
    profile[t] = bump(x, 0.30) + bump(x, 0.75);
  }
  const double peak = profile.empty() ? 1.0 : *std::max_element(profile.begin(), profile.end());
  for (double& v : profile) v /= peak;
  return profile;
}

namespace {

double param(const FamilySpec& family, const std::string& key) {
  auto it = family.params.find(key);
  if (it == family.params.end()) {
    throw Error(ErrorCode::kInvalidParameters,
                "family '" + family.name + "' requires parameter '" + key + "'");
  }
  return it->second;
}

void check_keys(const FamilySpec& family, std::set<std::string> allowed) {
  for (const auto& [key, value] : family.params) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::kInvalidParameters,
                  "family '" + family.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidParameters, "parameter '" + key + "' is not finite");
    }
  }
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kInvalidParameters, message);
}

}  // namespace

ProbModel synth_prob_model(const FamilySpec& family, std::size_t lambda, std::size_t m_max,
                           std::uint64_t seed) {
  if (lambda == 0 || m_max == 0) {
    throw Error(ErrorCode::kInvalidConfig, "lambda and m_max must be positive");
  }
  const std::size_t cells = lambda * m_max;
  std::vector<double> click(cells), close(cells);

  if (family.name == "constant") {
    check_keys(family, {"q0", "c0"});
    const double q0 = param(family, "q0"), c0 = param(family, "c0");
    require(q0 >= 0.0 && q0 < 1.0, "constant: q0 must lie in [0, 1)");
    require(c0 > 0.0 && c0 <= 1.0, "constant: c0 must lie in (0, 1]");
    std::fill(click.begin(), click.end(), q0);
    std::fill(close.begin(), close.end(), c0);
  } else if (family.name == "fatigue") {
    check_keys(family, {"q0", "c0", "beta", "gamma"});
    const double q0 = param(family, "q0"), c0 = param(family, "c0");
    const double beta = param(family, "beta"), gamma = param(family, "gamma");
    require(q0 >= 0.0 && q0 < 1.0, "fatigue: q0 must lie in [0, 1)");
    require(c0 > 0.0 && c0 <= 1.0, "fatigue: c0 must lie in (0, 1]");
    require(beta > 0.0 && beta <= 1.0, "fatigue: beta must lie in (0, 1]");
    require(gamma >= 1.0, "fatigue: gamma must be >= 1");
    const auto daypart = daypart_profile(lambda);
    for (std::size_t t = 0; t < lambda; ++t) {
      for (std::size_t m = 0; m < m_max; ++m) {
        const double k = static_cast<double>(m);
        click[t * m_max + m] = q0 * std::pow(beta, k) * daypart[t];
        close[t * m_max + m] = std::min(1.0, c0 * std::pow(gamma, k));
      }
    }
  } else if (family.name == "random-table") {
    check_keys(family, {"q_hi", "c_lo", "c_hi"});
    const double q_hi = param(family, "q_hi");
    const double c_lo = param(family, "c_lo"), c_hi = param(family, "c_hi");
    require(q_hi > 0.0 && q_hi <= 1.0, "random-table: q_hi must lie in (0, 1]");
    require(c_lo > 0.0, "random-table: c_lo must be positive");
    require(c_lo <= c_hi && c_hi <= 1.0, "random-table: need c_lo <= c_hi <= 1");
    SplitMix64 rng(named_seed(seed, "random-table"));
    for (std::size_t i = 0; i < cells; ++i) {
      click[i] = rng.uniform(0.0, q_hi);
      close[i] = rng.uniform(c_lo, c_hi);
    }
  } else {
    throw Error(ErrorCode::kUnknownFamily, "unknown probability family '" + family.name + "'");
  }

  ProbModel model(lambda, m_max, std::move(click), std::move(close));
  model.set_origin(family, seed);
  return model;
}

std::size_t push_state_count(std::size_t lambda, std::size_t m_max) noexcept {
  std::size_t count = 2;
  for (std::size_t t = 0; t <= lambda; ++t) count += std::min(t, m_max) + 1;
  return count;
}

std::string grid_label(std::size_t t, std::size_t m) {
  return "(" + std::to_string(t) + "," + std::to_string(m) + ")";
}

DagModel build_push_dag(const PushScenarioConfig& config) {
  const std::size_t lambda = config.lambda, m_max = config.m_max;
  if (m_max < 1 || m_max > lambda) {
    throw Error(ErrorCode::kInvalidConfig, "need 1 <= m_max <= lambda (got lambda=" +
                                               std::to_string(lambda) +
                                               ", m_max=" + std::to_string(m_max) + ")");
  }
  const auto& probs = config.prob_model;
  if (probs.lambda() != lambda || probs.m_max() != m_max) {
    throw Error(ErrorCode::kInvalidConfig, "probability model dimensions do not match lambda x m_max");
  }

  // offset[t] = index of (t, 0).
  std::vector<std::uint32_t> offset(lambda + 2, 0);
  for (std::size_t t = 0; t <= lambda; ++t)
    offset[t + 1] = offset[t] + static_cast<std::uint32_t>(std::min(t, m_max) + 1);
  const StateId loss{offset[lambda + 1]};
  const StateId survive{offset[lambda + 1] + 1};
  const auto cell = [&](std::size_t t, std::size_t m) {
    return StateId{offset[t] + static_cast<std::uint32_t>(m)};
  };

  std::vector<StateSpec> states(push_state_count(lambda, m_max));
  for (std::size_t t = 0; t <= lambda; ++t) {
    for (std::size_t m = 0; m <= std::min(t, m_max); ++m) {
      StateSpec& s = states[cell(t, m).index];
      s.label = grid_label(t, m);
      if (t == lambda) {
        s.actions.push_back({"end-day", {{survive, 1.0, 0.0}}});
        continue;
      }
      if (m < m_max) {
        const double close = probs.close(t, m);
        ActionSpec send{"send", {}};
        if (close < 1.0) send.transitions.push_back({cell(t + 1, m + 1), 1.0 - close, probs.click(t, m)});
        send.transitions.push_back({loss, close, 0.0});
        s.actions.push_back(std::move(send));
      }
      s.actions.push_back({"skip", {{cell(t + 1, m), 1.0, 0.0}}});
    }
  }
  states[loss.index].label = "loss";
  states[survive.index].label = "survive";

  // A close probability of 1 cuts the send edge's survivor branch, which can
  // strand cells. Drop them so the model stays valid. Edges only point to
  // larger indices, so one forward sweep finds everything reachable.
  std::vector<bool> reached(states.size(), false);
  reached[cell(0, 0).index] = true;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (reached[i])
      for (const auto& a : states[i].actions)
        for (const auto& t : a.transitions) reached[t.target.index] = true;
  reached[loss.index] = reached[survive.index] = true;
  if (std::all_of(reached.begin(), reached.end(), [](bool b) { return b; }))
    return DagModel(std::move(states), cell(0, 0), loss, survive, 1.0);

  std::vector<std::uint32_t> renumber(states.size(), 0);
  std::vector<StateSpec> kept;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!reached[i]) continue;
    renumber[i] = static_cast<std::uint32_t>(kept.size());
    kept.push_back(std::move(states[i]));
  }
  for (auto& s : kept)
    for (auto& a : s.actions)
      for (auto& t : a.transitions) t.target = StateId{renumber[t.target.index]};
  return DagModel(std::move(kept), StateId{renumber[cell(0, 0).index]}, StateId{renumber[loss.index]},
                  StateId{renumber[survive.index]}, 1.0);
}

}  // namespace ltv
