#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ltv/cli/commands.hpp"
#include "ltv/cli/io.hpp"
#include "ltv/model.hpp"

namespace ltv::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kData = LTV_TEST_DATA_DIR;
const fs::path kScenarios = LTV_SCENARIO_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(RunConfig config) {
  std::ostringstream out, err;
  const int code = run_command(config, out, err);
  return {code, out.str(), err.str()};
}

// Value of a "key=value" line.
std::string field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("ltv-cli-" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& contents) {
    const auto path = dir_ / name;
    std::ofstream(path) << contents;
    return path;
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateSmallScenario) {
  RunConfig config;
  config.command = "generate";
  config.scenario = (kScenarios / "constant_L2_M1.json").string();
  config.out = (dir_ / "push.json").string();
  const auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("wrote 7 states"), std::string::npos);

  const auto model = read_model_file(config.out);
  EXPECT_EQ(model.size(), 7u);
  EXPECT_TRUE(validate_model(model).ok());
  // Writing what was read reproduces the file byte for byte.
  EXPECT_EQ(dump_model(model), slurp(config.out));

  config.out = (dir_ / "again.json").string();
  ASSERT_EQ(run(config).code, kExitOk);
  EXPECT_EQ(slurp(dir_ / "push.json"), slurp(config.out));
}

TEST_F(CliTest, GenerateRejectsCapAboveSlots) {
  RunConfig config;
  config.command = "generate";
  config.scenario =
      write("bad.json", R"({"lambda": 2, "m_max": 3, "prob_model": {"family": "constant", "params": {"q0": 0.5, "c0": 0.2}}})")
          .string();
  const auto result = run(config);
  EXPECT_EQ(result.code, kExitInput);
  EXPECT_NE(result.err.find("InvalidConfig"), std::string::npos);
}

TEST_F(CliTest, GenerateFromExplicitTables) {
  RunConfig config;
  config.command = "generate";
  config.scenario = write("tables.json", R"({"lambda": 2, "m_max": 1, "prob_model": {"tables": {
      "click": [[0.5], [0.25]], "close": [[0.2], [0.1]]}}})")
                        .string();
  const auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  const auto model = parse_model(result.out);
  EXPECT_EQ(model.size(), 7u);
}

TEST_F(CliTest, SolveT2) {
  RunConfig config;
  config.command = "solve";
  config.models = {(kData / "t2.json").string()};
  auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NEAR(std::stod(field(result.out, "ltv")), 7.6, 1e-6);
  EXPECT_EQ(field(result.out, "policy_ltv"), "7.600000");
  EXPECT_EQ(field(result.out, "policy"), R"({"init":"B"})");

  config.solver = "bf";
  result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(field(result.out, "value"), "0.500000");
  EXPECT_EQ(field(result.out, "policy"), R"({"init":"A"})");

  config.solver = "bf-unrolled:2";
  result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(field(result.out, "policy"), R"({"init":"B"})");

  config.solver = "annealing";
  EXPECT_EQ(run(config).code, kExitInput);
}

TEST_F(CliTest, SolveWritesJsonWithTrace) {
  RunConfig config;
  config.command = "solve";
  config.models = {(kData / "t2.json").string()};
  config.trace = true;
  config.out = (dir_ / "solution.json").string();
  const auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("trace left="), std::string::npos);
  const auto doc = read_json_file(config.out);
  EXPECT_NEAR(doc.at("ltv").get<double>(), 7.6, 1e-6);
  EXPECT_EQ(doc.at("bracket_trace").size(), doc.at("iterations").get<std::size_t>());
}

TEST_F(CliTest, SolveUnboundedModelIsSemanticError) {
  RunConfig config;
  config.command = "solve";
  config.models = {(kData / "unbounded.json").string()};
  const auto result = run(config);
  EXPECT_EQ(result.code, kExitSemantic);
  EXPECT_NE(result.err.find("UnboundedLtv"), std::string::npos);
}

TEST_F(CliTest, EvalWithPolicyFile) {
  RunConfig config;
  config.command = "eval";
  config.models = {(kData / "t2.json").string()};
  config.policy = write("policy.json", R"({"init": "B"})").string();
  auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(field(result.out, "ltv"), "7.600000");
  EXPECT_EQ(field(result.out, "lt"), "20.000000");
  EXPECT_EQ(field(result.out, "ctr"), "0.380000");
  EXPECT_EQ(field(result.out, "immortal"), "false");

  config.policy = write("bad_policy.json", R"({"init": "C"})").string();
  result = run(config);
  EXPECT_EQ(result.code, kExitInput);
  EXPECT_NE(result.err.find("InvalidPolicy"), std::string::npos);
}

TEST_F(CliTest, SimulateIsSeeded) {
  RunConfig config;
  config.command = "simulate";
  config.models = {(kData / "t2.json").string()};
  config.episodes = 2000;
  config.seed = 3;
  const auto a = run(config);
  const auto b = run(config);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(field(a.out, "analytic_ltv"), "7.600000");
  config.threads = 3;
  EXPECT_EQ(run(config).out, a.out);
}

TEST_F(CliTest, CompareModelsCsv) {
  RunConfig config;
  config.command = "compare";
  config.models = {(kData / "t1.json").string(), (kData / "t2.json").string()};
  config.format = "csv";
  const auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(result.out,
            "model_id,method,ltv,lt,ctr\n"
            "t1,Greedy,1.000000,2.000000,0.500000\n"
            "t1,BF,1.000000,2.000000,0.500000\n"
            "t1,MREOpt,1.000000,2.000000,0.500000\n"
            "t2,Greedy,1.000000,2.000000,0.500000\n"
            "t2,BF,1.000000,2.000000,0.500000\n"
            "t2,MREOpt,7.600000,20.000000,0.380000\n");
}

TEST_F(CliTest, CompareEmptySweepHasHeaderOnly) {
  RunConfig config;
  config.command = "compare";
  config.format = "csv";
  config.scenario = write("sweep.json", R"({"sweep": {"lambda": [], "m": [10],
      "prob_model": {"family": "constant", "params": {"q0": 0.5, "c0": 0.2}}}})")
                        .string();
  const auto result = run(config);
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(result.out, "model_id,method,ltv,lt,ctr\n");
}

TEST_F(CliTest, CertifySmallRunIsDeterministic) {
  RunConfig config;
  config.command = "certify";
  config.instances = 25;
  config.seed = 11;
  const auto a = run(config);
  ASSERT_EQ(a.code, kExitOk) << a.out << a.err;
  EXPECT_NE(a.out.find("25/25 pass"), std::string::npos);
  EXPECT_EQ(run(config).out, a.out);
}

TEST_F(CliTest, CertifyRefusesOversizedEnumeration) {
  RunConfig config;
  config.command = "certify";
  config.max_states = 8;
  config.max_actions = 10;
  const auto result = run(config);
  EXPECT_EQ(result.code, kExitInput);
  EXPECT_NE(result.err.find("TooManyPolicies"), std::string::npos);
}

TEST_F(CliTest, ParseErrorsNameTheField) {
  RunConfig config;
  config.command = "solve";
  config.models = {write("broken.json", R"({"states": [{"id": 0, "label": "x"}]})").string()};
  auto result = run(config);
  EXPECT_EQ(result.code, kExitInput);
  EXPECT_NE(result.err.find("$.states[0]"), std::string::npos) << result.err;

  config.models = {write("garbage.json", "{not json").string()};
  EXPECT_EQ(run(config).code, kExitInput);

  config.models = {(dir_ / "missing.json").string()};
  EXPECT_EQ(run(config).code, kExitInput);

  config.command = "teleport";
  EXPECT_EQ(run(config).code, kExitInput);
}

TEST_F(CliTest, NearUnitSumsAreRenormalized) {
  const auto model = parse_model(R"({"states": [
      {"id": 0, "label": "init", "actions": [{"label": "A", "transitions": [
          {"target": 2, "p": 0.5000000001, "r": 1.0}, {"target": 1, "p": 0.5, "r": 0.0}]}]},
      {"id": 1, "label": "loss", "actions": []},
      {"id": 2, "label": "survive", "actions": []}],
    "init": 0, "loss": 1, "survive": 2, "r_max": 1.0})");
  EXPECT_TRUE(validate_model(model).ok()) << validate_model(model).summary();
  const auto& t = model.state(StateId{0}).actions[0].transitions;
  EXPECT_NEAR(t[0].probability + t[1].probability, 1.0, 1e-15);

  const auto far = parse_model(R"({"states": [
      {"id": 0, "label": "init", "actions": [{"label": "A", "transitions": [
          {"target": 2, "p": 0.6, "r": 1.0}, {"target": 1, "p": 0.5, "r": 0.0}]}]},
      {"id": 1, "label": "loss", "actions": []},
      {"id": 2, "label": "survive", "actions": []}],
    "init": 0, "loss": 1, "survive": 2, "r_max": 1.0})");
  EXPECT_TRUE(validate_model(far).has("probability-sum"));
}

TEST_F(CliTest, InvalidModelFileIsInputError) {
  RunConfig config;
  config.command = "eval";
  config.models = {write("cyclic.json", R"({"states": [
      {"id": 0, "label": "init", "actions": [{"label": "A", "transitions": [{"target": 0, "p": 1.0, "r": 0.0}]}]},
      {"id": 1, "label": "loss", "actions": []},
      {"id": 2, "label": "survive", "actions": []}],
    "init": 0, "loss": 1, "survive": 2, "r_max": 1.0})")
                       .string()};
  const auto result = run(config);
  EXPECT_EQ(result.code, kExitInput);
  EXPECT_NE(result.err.find("acyclic"), std::string::npos) << result.err;
}

}  // namespace
}  // namespace ltv::cli
