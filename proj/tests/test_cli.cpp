#include "qss/cli.hpp"
#include "qss/serialize.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using qss::Json;
using namespace qss::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qss_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    unsetenv("QSS_SEED");
  }
  void TearDown() override {
    unsetenv("QSS_SEED");
    fs::remove_all(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::vector<std::string> lines(const std::string& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ExhaustiveRunSucceeds) {
  const auto out = path("t.jsonl");
  ASSERT_EQ(run({"run", "--n-users", "2", "--secret", "haar-random", "--mode", "exhaustive", "--seed", "1",
                 "--out", out}),
            kSuccess);
  const auto l = lines(out);
  ASSERT_FALSE(l.empty());
  const Json header = Json::parse(l.front());
  EXPECT_EQ(header.at("event"), "header");
  EXPECT_EQ(header.at("version"), qss::kVersion);
  std::size_t recovers = 0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    const Json e = Json::parse(l[i]);
    if (e.at("event") == "recover") {
      ++recovers;
      EXPECT_GE(e.at("fidelity").get<double>(), 1 - 1e-9);
    }
  }
  EXPECT_EQ(recovers, 32u);
}

TEST_F(CliTest, SampledFourPartyRun) {
  const auto out = path("t.jsonl");
  ASSERT_EQ(run({"run", "--n-users", "3", "--mode", "sampled", "--trials", "1000", "--seed", "42", "--out", out}),
            kSuccess);
  std::size_t trials = 0;
  for (const auto& l : lines(out)) trials += Json::parse(l).at("event") == "recover";
  EXPECT_EQ(trials, 1000u);
}

TEST_F(CliTest, TableForThreeUsers) {
  const auto out = path("table.json");
  ASSERT_EQ(run({"table", "--n-users", "3", "--out", out}), kSuccess);
  const Json doc = Json::parse(slurp(out));
  EXPECT_EQ(doc.at("entries").size(), 256u);
  EXPECT_EQ(doc.at("n_users"), 3);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  for (const std::string sub : {"run", "table", "security"}) {
    std::vector<std::string> base = {sub, "--seed", "5"};
    if (sub == "run") base.insert(base.end(), {"--mode", "sampled", "--trials", "50"});
    if (sub == "security") base.insert(base.end(), {"--scenario", "intercept", "--trials", "300"});
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a"), "--threads", "1"});
    b.insert(b.end(), {"--out", path("b"), "--threads", "3"});
    ASSERT_EQ(run(a), kSuccess) << sub;
    ASSERT_EQ(run(b), kSuccess) << sub;
    EXPECT_EQ(slurp(path("a")), slurp(path("b"))) << sub;
  }
}

TEST_F(CliTest, CsvSummary) {
  const auto csv = path("s.csv");
  ASSERT_EQ(run({"run", "--alpha-re", "0.6", "--beta-re", "0.8", "--out", path("t.jsonl"), "--csv", csv}),
            kSuccess);
  const auto l = lines(csv);
  ASSERT_EQ(l.size(), 2u + 32u);
  EXPECT_EQ(l[0].rfind("# qss ", 0), 0u);
  EXPECT_EQ(l[1], "trial,branch,alice_outcome,x_outcomes,pauli,fidelity");
}

TEST_F(CliTest, UnnormalizedSecretIsConfigError) {
  EXPECT_EQ(run({"run", "--alpha-re", "0.9", "--beta-re", "0.0", "--out", path("t.jsonl")}), kConfigError);
  EXPECT_FALSE(fs::exists(path("t.jsonl")));
}

TEST_F(CliTest, NearlyNormalizedSecretIsAccepted) {
  EXPECT_EQ(run({"run", "--alpha-re", "0.6000001", "--beta-re", "0.8", "--out", path("t.jsonl")}), kSuccess);
}

TEST_F(CliTest, MissingSeedIsConfigError) {
  EXPECT_EQ(run({"run", "--mode", "sampled", "--trials", "3", "--out", path("t.jsonl")}), kConfigError);
  EXPECT_EQ(run({"validate", "--out", path("v.json")}), kConfigError);
}

TEST_F(CliTest, SeedFromEnvironment) {
  setenv("QSS_SEED", "17", 1);
  ASSERT_EQ(run({"run", "--mode", "sampled", "--trials", "3", "--out", path("a")}), kSuccess);
  unsetenv("QSS_SEED");
  ASSERT_EQ(run({"run", "--mode", "sampled", "--trials", "3", "--seed", "17", "--out", path("b")}), kSuccess);
  EXPECT_EQ(slurp(path("a")), slurp(path("b")));
  setenv("QSS_SEED", "not-a-number", 1);
  EXPECT_EQ(run({"run", "--mode", "sampled", "--out", path("c")}), kConfigError);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const auto cfg = path("cfg.json");
  std::ofstream(cfg) << R"({"n_users": 3, "mode": "sampled", "trials": 4, "seed": 9})";
  ASSERT_EQ(run({"run", "--config", cfg, "--trials", "2", "--out", path("t.jsonl")}), kSuccess);
  const Json header = Json::parse(lines(path("t.jsonl")).front());
  EXPECT_EQ(header.at("config").at("n_users"), 3);
  EXPECT_EQ(header.at("config").at("trials"), 2);
  EXPECT_EQ(header.at("config").at("seed"), 9);
}

TEST_F(CliTest, UnknownConfigKeyIsConfigError) {
  const auto cfg = path("cfg.json");
  std::ofstream(cfg) << R"({"n_userz": 3})";
  EXPECT_EQ(run({"table", "--config", cfg, "--out", path("t.json")}), kConfigError);
}

TEST_F(CliTest, BadFlagsAreConfigErrors) {
  EXPECT_EQ(run({"run", "--n-users", "1"}), kConfigError);
  EXPECT_EQ(run({"run", "--mode", "fast"}), kConfigError);
  EXPECT_EQ(run({"security", "--scenario", "nope", "--seed", "1"}), kConfigError);
  EXPECT_EQ(run({"security", "--scenario", "a", "--receiver", "2", "--seed", "1"}), kConfigError);
  EXPECT_EQ(run({"frobnicate"}), kConfigError);
}

TEST_F(CliTest, MistimedRunFailsAssertion) {
  EXPECT_EQ(run({"run", "--alpha-re", "0.6", "--beta-re", "0.8", "--lambda-t", "0.83", "--out",
                 path("t.jsonl")}),
            kAssertionFailure);
}

TEST_F(CliTest, SecurityScenarios) {
  const auto out = path("r.json");
  ASSERT_EQ(run({"security", "--scenario", "a", "--trials", "1000", "--seed", "3", "--out", out}), kSuccess);
  EXPECT_EQ(Json::parse(slurp(out)).at("success_rate"), 1.0);
  ASSERT_EQ(run({"security", "--scenario", "b", "--trials", "10000", "--seed", "3", "--out", out}), kSuccess);
  EXPECT_NEAR(Json::parse(slurp(out)).at("success_rate").get<double>(), 0.5, 0.015);
}

TEST_F(CliTest, ValidateSmallCutoffFails) {
  const auto out = path("v.json");
  EXPECT_EQ(run({"validate", "--ladder", "5:5", "--fock-cutoff", "2", "--samples", "10", "--seed", "3", "--out",
                 out}),
            kAssertionFailure);
  const Json doc = Json::parse(slurp(out));
  EXPECT_FALSE(doc.at("warnings").empty());
  EXPECT_EQ(doc.at("trend").at("checked"), false);
}
