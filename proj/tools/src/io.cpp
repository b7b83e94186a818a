#include "ltv/cli/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ltv/error.hpp"

namespace ltv::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kParseError, path + ": " + message);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t index(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  fail(path, "expected a non-negative integer");
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

StateId state_ref(const json& j, const std::string& path) {
  const auto v = index(j, path);
  if (v > std::numeric_limits<std::uint32_t>::max()) fail(path, "state id too large");
  return StateId{static_cast<std::uint32_t>(v)};
}

}  // namespace

DagModel model_from_json(const json& doc) {
  const auto& states_json = array(member(doc, "states", "$"), "$.states");
  const std::size_t n = states_json.size();
  std::vector<StateSpec> states(n);
  std::vector<bool> filled(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    const std::string sp = "$.states[" + std::to_string(i) + "]";
    const auto& sj = states_json[i];
    const auto id = index(member(sj, "id", sp), sp + ".id");
    if (id >= n) fail(sp + ".id", "id " + std::to_string(id) + " out of range");
    if (filled[id]) fail(sp + ".id", "duplicate id " + std::to_string(id));
    filled[id] = true;

    StateSpec& state = states[id];
    state.label = text(member(sj, "label", sp), sp + ".label");
    const auto& actions = array(member(sj, "actions", sp), sp + ".actions");
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const std::string ap = sp + ".actions[" + std::to_string(a) + "]";
      ActionSpec action;
      action.label = text(member(actions[a], "label", ap), ap + ".label");
      const auto& transitions = array(member(actions[a], "transitions", ap), ap + ".transitions");
      double sum = 0.0;
      for (std::size_t k = 0; k < transitions.size(); ++k) {
        const std::string tp = ap + ".transitions[" + std::to_string(k) + "]";
        Transition t;
        t.target = state_ref(member(transitions[k], "target", tp), tp + ".target");
        t.probability = number(member(transitions[k], "p", tp), tp + ".p");
        t.reward = number(member(transitions[k], "r", tp), tp + ".r");
        sum += t.probability;
        action.transitions.push_back(t);
      }
      if (sum != 1.0 && std::abs(sum - 1.0) <= kProbabilitySumTolerance) {
        for (auto& t : action.transitions) t.probability /= sum;
      }
      state.actions.push_back(std::move(action));
    }
  }

  const auto init = state_ref(member(doc, "init", "$"), "$.init");
  const auto loss = state_ref(member(doc, "loss", "$"), "$.loss");
  const auto survive = state_ref(member(doc, "survive", "$"), "$.survive");
  const double r_max = number(member(doc, "r_max", "$"), "$.r_max");
  return DagModel(std::move(states), init, loss, survive, r_max);
}

json model_to_json(const DagModel& model) {
  json states = json::array();
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    const auto& s = model.states()[i];
    json actions = json::array();
    for (const auto& a : s.actions) {
      json transitions = json::array();
      for (const auto& t : a.transitions)
        transitions.push_back({{"target", t.target.index}, {"p", t.probability}, {"r", t.reward}});
      actions.push_back({{"label", a.label}, {"transitions", std::move(transitions)}});
    }
    states.push_back({{"id", i}, {"label", s.label}, {"actions", std::move(actions)}});
  }
  return {{"states", std::move(states)},
          {"init", model.init().index},
          {"loss", model.loss().index},
          {"survive", model.survive().index},
          {"r_max", model.r_max()}};
}

DagModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return model_from_json(doc);
}

std::string dump_model(const DagModel& model) { return model_to_json(model).dump(1) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

DagModel read_model_file(const std::filesystem::path& path) {
  return model_from_json(read_json_file(path));
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write '" + path.string() + "'");
  out << contents;
}

namespace {

FamilySpec family_from_json(const json& pm, const std::string& path) {
  FamilySpec family;
  family.name = text(member(pm, "family", path), path + ".family");
  if (pm.contains("params")) {
    const auto& params = pm.at("params");
    if (!params.is_object()) fail(path + ".params", "expected an object");
    for (const auto& [key, value] : params.items())
      family.params[key] = number(value, path + ".params." + key);
  }
  return family;
}

std::vector<double> table(const json& j, std::size_t lambda, std::size_t m_max,
                          const std::string& path) {
  array(j, path);
  if (j.size() != lambda) fail(path, "expected " + std::to_string(lambda) + " rows (lambda)");
  std::vector<double> out;
  out.reserve(lambda * m_max);
  for (std::size_t t = 0; t < lambda; ++t) {
    const std::string rp = path + "[" + std::to_string(t) + "]";
    array(j[t], rp);
    if (j[t].size() != m_max) fail(rp, "expected " + std::to_string(m_max) + " columns (m_max)");
    for (std::size_t m = 0; m < m_max; ++m)
      out.push_back(number(j[t][m], rp + "[" + std::to_string(m) + "]"));
  }
  return out;
}

}  // namespace

PushScenarioConfig scenario_from_json(const json& doc, std::optional<std::uint64_t> seed_override) {
  PushScenarioConfig config;
  config.lambda = index(member(doc, "lambda", "$"), "$.lambda");
  config.m_max = index(member(doc, "m_max", "$"), "$.m_max");
  if (config.m_max < 1 || config.m_max > config.lambda) {
    throw Error(ErrorCode::kInvalidConfig, "need 1 <= m_max <= lambda (got lambda=" +
                                               std::to_string(config.lambda) + ", m_max=" +
                                               std::to_string(config.m_max) + ")");
  }
  const auto& pm = member(doc, "prob_model", "$");
  if (pm.contains("tables")) {
    const auto& tables = pm.at("tables");
    config.prob_model = ProbModel(
        config.lambda, config.m_max,
        table(member(tables, "click", "$.prob_model.tables"), config.lambda, config.m_max,
              "$.prob_model.tables.click"),
        table(member(tables, "close", "$.prob_model.tables"), config.lambda, config.m_max,
              "$.prob_model.tables.close"));
  } else {
    const auto family = family_from_json(pm, "$.prob_model");
    std::uint64_t seed = pm.contains("seed") ? index(pm.at("seed"), "$.prob_model.seed") : 0;
    if (seed_override) seed = *seed_override;
    config.prob_model = synth_prob_model(family, config.lambda, config.m_max, seed);
  }
  return config;
}

json scenario_to_json(const PushScenarioConfig& config) {
  json pm;
  const auto& probs = config.prob_model;
  if (probs.family()) {
    pm = {{"family", probs.family()->name}, {"params", probs.family()->params}, {"seed", probs.seed()}};
  } else {
    json click = json::array(), close = json::array();
    for (std::size_t t = 0; t < probs.lambda(); ++t) {
      json crow = json::array(), xrow = json::array();
      for (std::size_t m = 0; m < probs.m_max(); ++m) {
        crow.push_back(probs.click(t, m));
        xrow.push_back(probs.close(t, m));
      }
      click.push_back(std::move(crow));
      close.push_back(std::move(xrow));
    }
    pm = {{"tables", {{"click", std::move(click)}, {"close", std::move(close)}}}};
  }
  return {{"lambda", config.lambda}, {"m_max", config.m_max}, {"prob_model", std::move(pm)}};
}

bool is_sweep(const json& doc) { return doc.is_object() && doc.contains("sweep"); }

SweepSpec sweep_from_json(const json& doc, std::uint64_t default_seed) {
  const auto& sweep = member(doc, "sweep", "$");
  SweepSpec spec;
  for (const auto& v : array(member(sweep, "lambda", "$.sweep"), "$.sweep.lambda"))
    spec.lambdas.push_back(index(v, "$.sweep.lambda[]"));
  for (const auto& v : array(member(sweep, "m", "$.sweep"), "$.sweep.m"))
    spec.ms.push_back(index(v, "$.sweep.m[]"));
  spec.family = family_from_json(member(sweep, "prob_model", "$.sweep"), "$.sweep.prob_model");
  if (sweep.contains("seeds")) {
    for (const auto& v : array(sweep.at("seeds"), "$.sweep.seeds"))
      spec.seeds.push_back(index(v, "$.sweep.seeds[]"));
  } else {
    spec.seeds.push_back(default_seed);
  }
  return spec;
}

json policy_to_json(const DagModel& model, const Policy& policy) {
  check_policy(model, policy);
  json out = json::object();
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    const StateId s{i};
    if (model.is_terminal(s)) continue;
    const auto& state = model.state(s);
    out[state.label] = state.actions[policy[s]].label;
  }
  return out;
}

Policy policy_from_json(const DagModel& model, const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidPolicy, "policy must be a JSON object");
  Policy policy{std::vector<std::uint32_t>(model.size(), 0)};
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    const StateId s{i};
    if (model.is_terminal(s)) continue;
    const auto& state = model.state(s);
    auto it = doc.find(state.label);
    if (it == doc.end() || !it->is_string()) {
      throw Error(ErrorCode::kInvalidPolicy, "no action given for state '" + state.label + "'");
    }
    const auto label = it->get<std::string>();
    bool found = false;
    for (std::uint32_t a = 0; a < state.actions.size() && !found; ++a) {
      if (state.actions[a].label == label) {
        policy.choice[i] = a;
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kInvalidPolicy,
                  "state '" + state.label + "' has no action '" + label + "'");
    }
  }
  return policy;
}

}  // namespace ltv::cli
