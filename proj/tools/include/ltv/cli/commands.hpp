#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ltv/error.hpp"
#include "ltv/evaluation.hpp"
#include "ltv/solvers.hpp"

namespace ltv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSemantic = 3;
inline constexpr int kExitCertifyFailed = 4;

/// 2 for input/config problems, 3 for model semantics (unbounded models etc.).
int exit_code_for(ErrorCode code) noexcept;

struct RunConfig {
  std::string command;
  std::vector<std::string> models;
  std::string scenario;
  std::string policy;
  std::string out;
  double epsilon = 1e-6;
  std::string solver = "mreopt";  // greedy | bf | bf-unrolled[:K] | mreopt
  std::size_t k_days = 100;
  std::string format = "text";    // text | csv
  std::optional<std::uint64_t> seed;
  GreedyMode greedy_mode = GreedyMode::kConditional;
  SimMode sim_mode = SimMode::kExpected;
  std::size_t episodes = 100000;
  std::size_t max_rounds = 10000;
  bool trace = false;
  std::size_t instances = 200;
  std::size_t max_states = 8;
  std::size_t max_actions = 3;
  unsigned threads = 1;
};

/// Dispatches on config.command. Errors are reported on `err` and mapped to
/// exit codes; nothing throws out of here.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

int cmd_generate(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_compare(const RunConfig& config, std::ostream& out);
int cmd_certify(const RunConfig& config, std::ostream& out);

}  // namespace ltv::cli
