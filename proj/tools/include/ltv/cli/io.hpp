#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ltv/model.hpp"
#include "ltv/push_scenario.hpp"
#include "ltv/solvers.hpp"

namespace ltv::cli {

using nlohmann::json;

/// Model document: {states: [{id, label, actions: [{label, transitions:
/// [{target, p, r}]}]}], init, loss, survive, r_max}. Actions whose
/// probabilities sum to 1 within tolerance are renormalized. Throws
/// Error(kParseError) naming the offending JSON path.
DagModel model_from_json(const json& doc);
json model_to_json(const DagModel& model);

/// Text form written by `generate`; parse errors report line and column.
DagModel parse_model(const std::string& text);
std::string dump_model(const DagModel& model);

DagModel read_model_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Scenario document: {lambda, m_max, prob_model}, where prob_model is
/// {family, params, seed} or {tables: {click: [[...]], close: [[...]]}}.
/// `seed_override` replaces the document's seed.
PushScenarioConfig scenario_from_json(const json& doc,
                                      std::optional<std::uint64_t> seed_override = std::nullopt);
json scenario_to_json(const PushScenarioConfig& config);

/// Grid sweep for `compare`: {sweep: {lambda: [...], m: [...], prob_model:
/// {family, params}, seeds: [...]}}.
struct SweepSpec {
  std::vector<std::size_t> lambdas;
  std::vector<std::size_t> ms;
  FamilySpec family;
  std::vector<std::uint64_t> seeds;
};

bool is_sweep(const json& doc);
SweepSpec sweep_from_json(const json& doc, std::uint64_t default_seed);

/// Policies serialize as {state_label: action_label} over non-terminal states.
json policy_to_json(const DagModel& model, const Policy& policy);
Policy policy_from_json(const DagModel& model, const json& doc);

}  // namespace ltv::cli
