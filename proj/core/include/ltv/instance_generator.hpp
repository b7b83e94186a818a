#pragma once

#include <cstddef>
#include <cstdint>

#include "ltv/model.hpp"

namespace ltv {

/// Shape of the random DAG instances used for certification.
struct InstanceSpec {
  std::size_t max_decision_states = 8;
  std::size_t max_actions = 3;
  double min_loss = 0.01;  // every action reaches loss with at least this probability
  double max_loss = 0.5;
  double max_reward = 1.0;
};

/// Random valid model: decision states 0..n-1 (init = 0, edges only go to
/// higher indices), then loss = n and survive = n + 1. Every decision state is
/// reachable from init and every action risks loss, so the model is Bounded.
/// Deterministic in (spec, seed).
DagModel random_instance(const InstanceSpec& spec, std::uint64_t seed);

}  // namespace ltv
