#include "ltv/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "ltv/cli/io.hpp"
#include "ltv/instance_generator.hpp"
#include "ltv/model.hpp"
#include "ltv/push_scenario.hpp"
#include "ltv/random.hpp"

namespace ltv::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnboundedModel:
    case ErrorCode::kUnboundedLtv:
    case ErrorCode::kBracketOverflow:
    case ErrorCode::kInvalidStats:
      return kExitSemantic;
    default:
      return kExitInput;
  }
}

namespace {

struct SolverChoice {
  enum class Kind { kGreedy, kBf, kBfUnrolled, kMreopt } kind = Kind::kMreopt;
  std::size_t k_days = 1;
};

SolverChoice parse_solver(const RunConfig& config) {
  const std::string& s = config.solver;
  if (s == "greedy") return {SolverChoice::Kind::kGreedy};
  if (s == "bf") return {SolverChoice::Kind::kBf};
  if (s == "mreopt") return {SolverChoice::Kind::kMreopt};
  if (s.rfind("bf-unrolled", 0) == 0) {
    SolverChoice choice{SolverChoice::Kind::kBfUnrolled, config.k_days};
    if (s.size() > 11) {
      if (s[11] != ':') throw Error(ErrorCode::kInvalidConfig, "unknown solver '" + s + "'");
      try {
        std::size_t used = 0;
        const auto k = std::stoull(s.substr(12), &used);
        if (used != s.size() - 12) throw std::invalid_argument("trailing");
        choice.k_days = k;
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidConfig, "bad day count in '" + s + "'");
      }
    }
    if (choice.k_days < 1) throw Error(ErrorCode::kInvalidConfig, "k_days must be >= 1");
    return choice;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown solver '" + s + "'");
}

void require_epsilon(const RunConfig& config) {
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    throw Error(ErrorCode::kInvalidConfig, "epsilon must be positive");
}

DagModel load_single_model(const RunConfig& config) {
  if (config.models.size() != 1) throw Error(ErrorCode::kInvalidConfig, "exactly one --model is required");
  auto model = read_model_file(config.models.front());
  require_valid(model);
  return model;
}

void require_bounded(const DagModel& model) {
  if (check_boundedness(model) == Boundedness::kUnboundedLtv) {
    throw Error(ErrorCode::kUnboundedLtv,
                "a strategy survives every round with certainty and earns positive reward");
  }
}

Policy choose_policy(const DagModel& model, const RunConfig& config) {
  if (!config.policy.empty()) return policy_from_json(model, read_json_file(config.policy));
  const auto solver = parse_solver(config);
  switch (solver.kind) {
    case SolverChoice::Kind::kGreedy: return solve_greedy(model, config.greedy_mode);
    case SolverChoice::Kind::kBf: return solve_bf_one_round(model).policy;
    case SolverChoice::Kind::kBfUnrolled: return solve_bf_unrolled(model, solver.k_days).policy;
    case SolverChoice::Kind::kMreopt:
      require_bounded(model);
      return solve_mreopt(model, {config.epsilon}).policy;
  }
  return {};
}

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (config.out.empty()) {
    out << text;
  } else {
    write_text_file(config.out, text);
  }
}

std::uint64_t base_seed(const RunConfig& config) { return config.seed.value_or(0); }

}  // namespace

int cmd_generate(const RunConfig& config, std::ostream& out) {
  if (config.scenario.empty()) throw Error(ErrorCode::kInvalidConfig, "--scenario is required");
  std::optional<std::uint64_t> seed;
  if (config.seed) seed = named_seed(*config.seed, "generation");
  const auto scenario = scenario_from_json(read_json_file(config.scenario), seed);
  const auto model = build_push_dag(scenario);
  require_valid(model);
  const auto text = dump_model(model);
  if (config.out.empty()) {
    out << text;
  } else {
    write_text_file(config.out, text);
    out << "wrote " << model.size() << " states to " << config.out << '\n';
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  require_epsilon(config);
  const auto model = load_single_model(config);
  const auto solver = parse_solver(config);
  std::ostringstream os;
  json doc;
  doc["solver"] = config.solver;

  switch (solver.kind) {
    case SolverChoice::Kind::kGreedy: {
      const auto policy = solve_greedy(model, config.greedy_mode);
      os << "solver=greedy\n";
      doc["policy"] = policy_to_json(model, policy);
      break;
    }
    case SolverChoice::Kind::kBf:
    case SolverChoice::Kind::kBfUnrolled: {
      const auto result = solver.kind == SolverChoice::Kind::kBf
                              ? solve_bf_one_round(model)
                              : solve_bf_unrolled(model, solver.k_days);
      os << "solver=" << (solver.kind == SolverChoice::Kind::kBf ? "bf" : "bf-unrolled") << '\n';
      if (solver.kind == SolverChoice::Kind::kBfUnrolled) os << "k_days=" << solver.k_days << '\n';
      os << "value=" << format_number(result.value) << '\n';
      doc["value"] = result.value;
      doc["policy"] = policy_to_json(model, result.policy);
      break;
    }
    case SolverChoice::Kind::kMreopt: {
      require_bounded(model);
      const auto result = solve_mreopt(model, {config.epsilon});
      os << "solver=mreopt\n"
         << "ltv=" << format_number(result.ltv) << '\n'
         << "policy_ltv=" << format_number(result.policy_ltv) << '\n'
         << "p=" << format_number(result.pair.p) << '\n'
         << "r=" << format_number(result.pair.r) << '\n'
         << "iterations=" << result.iterations << '\n';
      doc["ltv"] = result.ltv;
      doc["policy_ltv"] = result.policy_ltv;
      doc["iterations"] = result.iterations;
      doc["policy"] = policy_to_json(model, result.policy);
      if (config.trace) {
        json trace = json::array();
        for (const auto& step : result.bracket_trace) {
          trace.push_back({{"left", step.left}, {"right", step.right}, {"g", step.g},
                           {"branch", std::string(to_string(step.kind))}});
          os << "trace left=" << format_number(step.left) << " right=" << format_number(step.right)
             << " g=" << format_number(step.g) << " branch=" << to_string(step.kind) << '\n';
        }
        doc["bracket_trace"] = std::move(trace);
      }
      break;
    }
  }
  os << "policy=" << doc["policy"].dump() << '\n';
  out << os.str();
  if (!config.out.empty()) write_text_file(config.out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
  require_epsilon(config);
  const auto model = load_single_model(config);
  const auto policy = choose_policy(model, config);
  const auto stats = evaluate_policy(model, policy);
  const auto report = metrics(stats);
  std::ostringstream os;
  os << "p=" << format_number(stats.p) << '\n'
     << "r=" << format_number(stats.r) << '\n'
     << "l=" << format_number(stats.l) << '\n'
     << "ltv=" << format_number(report.ltv) << '\n'
     << "lt=" << format_number(report.lt) << '\n'
     << "ctr=" << format_number(report.ctr) << '\n'
     << "immortal=" << (report.immortal ? "true" : "false") << '\n';
  emit(config, out, os.str());
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  require_epsilon(config);
  const auto model = load_single_model(config);
  const auto policy = choose_policy(model, config);
  SimOptions options;
  options.n_episodes = config.episodes;
  options.max_rounds = config.max_rounds;
  options.mode = config.sim_mode;
  options.seed = named_seed(base_seed(config), "simulation");
  options.threads = config.threads;
  const auto report = simulate_online(model, policy, options);
  const auto analytic = metrics(evaluate_policy(model, policy));

  std::ostringstream os;
  os << "episodes=" << report.n_episodes << '\n'
     << "mean_ltv=" << format_number(report.mean_ltv) << '\n'
     << "stderr_ltv=" << format_number(report.stderr_ltv) << '\n'
     << "mean_lt=" << format_number(report.mean_lt) << '\n'
     << "stderr_lt=" << format_number(report.stderr_lt) << '\n'
     << "mean_rounds=" << format_number(report.mean_rounds) << '\n'
     << "truncated_fraction=" << format_number(report.truncated_fraction) << '\n'
     << "analytic_ltv=" << format_number(analytic.ltv) << '\n'
     << "analytic_lt=" << format_number(analytic.lt) << '\n';
  emit(config, out, os.str());
  return kExitOk;
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
  require_epsilon(config);
  if (config.format != "csv" && config.format != "text")
    throw Error(ErrorCode::kInvalidConfig, "--format must be csv or text");

  std::vector<NamedModel> models;
  for (const auto& path : config.models) {
    auto model = read_model_file(path);
    require_valid(model);
    models.push_back({std::filesystem::path(path).stem().string(), std::move(model)});
  }
  if (!config.scenario.empty()) {
    const auto doc = read_json_file(config.scenario);
    if (is_sweep(doc)) {
      const auto sweep = sweep_from_json(doc, named_seed(base_seed(config), "generation"));
      for (auto lambda : sweep.lambdas) {
        for (auto m : sweep.ms) {
          for (auto seed : sweep.seeds) {
            PushScenarioConfig scenario{lambda, m, {}};
            if (m < 1 || m > lambda) {
              throw Error(ErrorCode::kInvalidConfig,
                          "need 1 <= m <= lambda in sweep (lambda=" + std::to_string(lambda) +
                              ", m=" + std::to_string(m) + ")");
            }
            scenario.prob_model = synth_prob_model(sweep.family, lambda, m, seed);
            models.push_back({"L" + std::to_string(lambda) + "-M" + std::to_string(m) + "-s" +
                                  std::to_string(seed),
                              build_push_dag(scenario)});
          }
        }
      }
    } else {
      std::optional<std::uint64_t> seed;
      if (config.seed) seed = named_seed(*config.seed, "generation");
      const auto scenario = scenario_from_json(doc, seed);
      models.push_back({std::filesystem::path(config.scenario).stem().string(),
                        build_push_dag(scenario)});
    }
  }

  for (const auto& m : models) require_bounded(m.model);
  const auto rows = compare(models, {config.epsilon, config.greedy_mode});
  std::ostringstream os;
  if (config.format == "csv") {
    write_comparison_csv(os, rows);
  } else {
    write_comparison_text(os, rows);
  }
  emit(config, out, os.str());
  return kExitOk;
}

int cmd_certify(const RunConfig& config, std::ostream& out) {
  require_epsilon(config);
  if (config.max_states < 1 || config.max_actions < 1)
    throw Error(ErrorCode::kInvalidConfig, "--max-states and --max-actions must be >= 1");
  {
    double worst = 1.0;
    for (std::size_t i = 0; i < config.max_states; ++i) worst *= static_cast<double>(config.max_actions);
    if (worst > static_cast<double>(kMaxEnumeratedPolicies)) {
      throw Error(ErrorCode::kTooManyPolicies,
                  "up to " + format_number(worst) + " policies per instance exceed the cap of " +
                      std::to_string(kMaxEnumeratedPolicies));
    }
  }

  InstanceSpec spec;
  spec.max_decision_states = config.max_states;
  spec.max_actions = config.max_actions;
  const std::uint64_t stream = named_seed(base_seed(config), "instances");
  const double tol = 10.0 * config.epsilon;

  std::size_t passed = 0;
  bool artifact_written = false;
  std::ostringstream os;
  for (std::size_t i = 0; i < config.instances; ++i) {
    const auto model = random_instance(spec, substream_seed(stream, i));
    std::vector<std::string> failures;
    const auto report = validate_model(model);
    if (!report.ok()) {
      failures.push_back("invalid instance: " + report.summary());
    } else {
      const auto oracle = enumerate_oracle(model, false);
      const auto result = solve_mreopt(model, {config.epsilon});
      const double evaluated = metrics(evaluate_policy(model, result.policy)).ltv;
      const double greedy = metrics(evaluate_policy(model, solve_greedy(model, config.greedy_mode))).ltv;
      const double bf = metrics(evaluate_policy(model, solve_bf_one_round(model).policy)).ltv;
      const double fixed_point = dp_pass(model, result.ltv).value();
      const auto check = [&](bool ok, const std::string& what, double a, double b) {
        if (!ok) failures.push_back(what + " (" + format_number(a) + " vs " + format_number(b) + ")");
      };
      check(std::abs(result.ltv - oracle.best_ltv) <= tol, "mreopt ltv != oracle", result.ltv, oracle.best_ltv);
      check(std::abs(evaluated - oracle.best_ltv) <= tol, "mreopt policy ltv != oracle", evaluated, oracle.best_ltv);
      check(std::abs(fixed_point - result.ltv) <= tol, "F(ltv) != ltv", fixed_point, result.ltv);
      check(greedy <= evaluated + tol, "greedy beats mreopt", greedy, evaluated);
      check(bf <= evaluated + tol, "bf beats mreopt", bf, evaluated);
    }
    if (failures.empty()) {
      ++passed;
      continue;
    }
    // With --out only the first failing instance is kept.
    for (const auto& f : failures) os << "instance " << i << ": FAIL " << f << '\n';
    if (config.out.empty() || !artifact_written) {
      const std::string artifact =
          config.out.empty() ? "certify-failure-" + std::to_string(i) + ".json" : config.out;
      write_text_file(artifact, dump_model(model));
      artifact_written = true;
      os << "instance " << i << ": replay with `ltv solve --model " << artifact << "`\n";
    }
  }
  os << passed << "/" << config.instances << " pass\n";
  out << os.str();
  return passed == config.instances ? kExitOk : kExitCertifyFailed;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == "generate") return cmd_generate(config, out);
    if (config.command == "solve") return cmd_solve(config, out);
    if (config.command == "eval") return cmd_eval(config, out);
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "compare") return cmd_compare(config, out);
    if (config.command == "certify") return cmd_certify(config, out);
    err << "error: unknown command '" << config.command << "'\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace ltv::cli
