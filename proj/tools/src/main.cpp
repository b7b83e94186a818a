#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ltv/cli/commands.hpp"

int main(int argc, char** argv) {
  using ltv::cli::RunConfig;

  CLI::App app{"Customer life-time value optimization over DAG-structured MDPs"};
  app.require_subcommand(1);
  RunConfig config;
  std::uint64_t seed = 0;
  std::string greedy_mode = "conditional";
  std::string sim_mode = "expected";

  const std::map<std::string, std::string> commands = {
      {"generate", "Build a push-scenario model file from a scenario config"},
      {"solve", "Run a solver on a model file"},
      {"eval", "Exact LTV/LT/CTR of a policy"},
      {"simulate", "Monte Carlo episodes of a policy"},
      {"compare", "Greedy vs BF vs MREOpt table over models or a sweep"},
      {"certify", "Check MREOpt against exhaustive enumeration on random instances"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--model", config.models, "Model file (repeatable for compare)");
    sub->add_option("--scenario", config.scenario, "Scenario config or sweep spec");
    sub->add_option("--policy", config.policy, "Policy file {state_label: action_label}");
    sub->add_option("--out", config.out, "Output path");
    sub->add_option("--solver", config.solver, "greedy | bf | bf-unrolled[:K] | mreopt");
    sub->add_option("--epsilon", config.epsilon, "Bisection bracket width");
    sub->add_option("--k-days", config.k_days, "Rounds for bf-unrolled");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--episodes", config.episodes, "Simulated episodes");
    sub->add_option("--max-rounds", config.max_rounds, "Round cap per episode");
    sub->add_option("--format", config.format, "csv | text")->check(CLI::IsMember({"csv", "text"}));
    sub->add_flag("--trace", config.trace, "Print the MREOpt bracket trace");
    sub->add_option("--greedy-mode", greedy_mode, "conditional | discounted")
        ->check(CLI::IsMember({"conditional", "discounted"}));
    sub->add_option("--sim-mode", sim_mode, "click | expected")
        ->check(CLI::IsMember({"click", "expected"}));
    sub->add_option("--instances", config.instances, "Certification instance count");
    sub->add_option("--max-states", config.max_states, "Decision states per certify instance");
    sub->add_option("--max-actions", config.max_actions, "Actions per state in certify instances");
    sub->add_option("--threads", config.threads, "Worker threads for simulate");
    sub->callback([&, name = name, sub] {
      config.command = name;
      if (sub->count("--seed") > 0) config.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ltv::cli::kExitInput;
  }
  config.greedy_mode = greedy_mode == "discounted" ? ltv::GreedyMode::kDiscounted
                                                   : ltv::GreedyMode::kConditional;
  config.sim_mode = sim_mode == "click" ? ltv::SimMode::kClick : ltv::SimMode::kExpected;
  return ltv::cli::run_command(config, std::cout, std::cerr);
}
