#include "qss/security.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qss;
using namespace qss::security;
using protocol::SecretAmplitudes;

namespace {

SecurityScenario scenario(ScenarioKind kind, int adversary = 1, std::optional<int> receiver = std::nullopt) {
  SecurityScenario s;
  s.kind = kind;
  s.users = 2;
  s.adversary = adversary;
  s.receiver = receiver;
  return s;
}

double three_sigma(double p, std::size_t n) { return 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(n)); }

std::vector<SecretAmplitudes> haar_secrets(std::size_t count, std::uint64_t seed) {
  std::vector<SecretAmplitudes> out;
  SplitRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    SplitRng s = rng.split("secret", i);
    out.push_back(SecretAmplitudes::haar(s));
  }
  return out;
}

}  // namespace

TEST(Scenario, Parsing) {
  EXPECT_EQ(parse_scenario("a"), ScenarioKind::AssignedWithCooperation);
  EXPECT_EQ(parse_scenario("b"), ScenarioKind::AssignedWithoutCooperation);
  EXPECT_EQ(parse_scenario("lie"), ScenarioKind::LieAboutX);
  EXPECT_EQ(parse_scenario("intercept"), ScenarioKind::InterceptResend);
  EXPECT_FALSE(parse_scenario("zzz").has_value());
  EXPECT_EQ(parse_policy("mixed"), SubstitutePolicy::MaximallyMixed);
}

TEST(Scenario, ValidationRules) {
  EXPECT_THROW(scenario(ScenarioKind::AssignedWithCooperation, 1, 2).validate(), Error);
  EXPECT_THROW(scenario(ScenarioKind::LieAboutX, 2, 2).validate(), Error);
  EXPECT_THROW(scenario(ScenarioKind::Honest, 3).validate(), Error);
  EXPECT_NO_THROW(scenario(ScenarioKind::LieAboutX, 1).validate());
  EXPECT_EQ(scenario(ScenarioKind::AssignedWithCooperation, 1).resolved_receiver(), 1);
  EXPECT_EQ(scenario(ScenarioKind::InterceptResend, 1).counterpart(), 2);
}

TEST(Security, CooperativeReceiverAlwaysSucceeds) {
  const SecurityReport r = simulate_scenario(scenario(ScenarioKind::AssignedWithCooperation), haar_sampler(), 1000, 11);
  EXPECT_EQ(r.successes, 1000u);
  EXPECT_EQ(r.success_rate, 1.0);
  EXPECT_EQ(r.adversary_success_rate, 1.0);
  EXPECT_EQ(r.check_rounds, 0u);
}

TEST(Security, WithheldOutcomeHalvesSuccess) {
  const SecurityReport r =
      simulate_scenario(scenario(ScenarioKind::AssignedWithoutCooperation), haar_sampler(), 10000, 12);
  EXPECT_NEAR(r.success_rate, 0.5, 0.015);
  EXPECT_LE(r.success_ci.low, r.success_rate);
  EXPECT_GE(r.success_ci.high, r.success_rate);
}

TEST(Security, WrongGuessFidelityIsPopulationImbalance) {
  const SecretAmplitudes s{0.6, Complex(0, 0.8)};
  const double expected = std::pow(0.36 - 0.64, 2);
  const auto table = protocol::derive_correction_table(protocol::PartyLayout(2), 4);
  SplitRng root(13);
  int wrong = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    SplitRng rng = root.split("trial", i);
    const TrialOutcome o = simulate_trial(scenario(ScenarioKind::AssignedWithoutCooperation), s, table, rng);
    ASSERT_TRUE(o.adversary_guessed);
    if (o.guess_correct) {
      EXPECT_NEAR(o.receiver_fidelity, 1.0, 1e-9);
    } else {
      ++wrong;
      EXPECT_NEAR(o.receiver_fidelity, expected, 1e-9);
    }
  }
  EXPECT_GT(wrong, 0);
}

TEST(Security, LyingCorruptsReceiverState) {
  const SecretAmplitudes s{0.6, Complex(0, 0.8)};
  const auto table = protocol::derive_correction_table(protocol::PartyLayout(2), 6);
  SplitRng root(14);
  for (std::uint64_t i = 0; i < 50; ++i) {
    SplitRng rng = root.split("trial", i);
    const TrialOutcome o = simulate_trial(scenario(ScenarioKind::LieAboutX), s, table, rng);
    EXPECT_NE(o.true_x, o.announced_x);
    EXPECT_NEAR(o.receiver_fidelity, std::pow(0.36 - 0.64, 2), 1e-9);
  }
}

TEST(Security, LiarOutcomeIndependentOfSecret) {
  const auto table = protocol::derive_correction_table(protocol::PartyLayout(2), 6);
  const std::size_t n = 4000;
  for (const SecretAmplitudes s : {SecretAmplitudes{1.0, 0.0}, SecretAmplitudes{0.6, Complex(0, 0.8)}}) {
    SplitRng root(15);
    std::size_t plus = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      SplitRng rng = root.split("trial", i);
      plus += simulate_trial(scenario(ScenarioKind::LieAboutX), s, table, rng).true_x == "+";
    }
    EXPECT_NEAR(static_cast<double>(plus) / n, 0.5, three_sigma(0.5, n));
  }
}

TEST(Security, LieDetectionMatchesHaarAverage) {
  const std::size_t n = 6000;
  const SecurityReport r = simulate_scenario(scenario(ScenarioKind::LieAboutX), haar_sampler(), n, 16);
  EXPECT_EQ(r.check_rounds, n);
  // E[1 - (|a|^2 - |b|^2)^2] over Haar = 2/3
  EXPECT_NEAR(r.detection_rate, 2.0 / 3.0, three_sigma(2.0 / 3.0, n));
}

TEST(Security, HonestRunsNeverFlag) {
  const SecurityReport r = simulate_scenario(scenario(ScenarioKind::Honest), haar_sampler(), 500, 17);
  EXPECT_EQ(r.flagged, 0u);
  EXPECT_EQ(r.success_rate, 1.0);
  EXPECT_EQ(r.detection_rate, 0.0);
}

TEST(Security, InterceptDetectedAtHalfRate) {
  const std::size_t n = 6000;
  const SecurityReport r = simulate_scenario(scenario(ScenarioKind::InterceptResend), haar_sampler(), n, 18);
  EXPECT_NEAR(r.detection_rate, 0.5, three_sigma(0.5, n));
  const double exact = expected_detection_rate(scenario(ScenarioKind::InterceptResend), haar_secrets(200, 19));
  EXPECT_NEAR(exact, 0.5, 0.05);
}

TEST(Security, InterceptCheckRoundsAgreeWithEnumeration) {
  const auto secrets = haar_secrets(4, 20);
  for (SubstitutePolicy policy : {SubstitutePolicy::Ground, SubstitutePolicy::MaximallyMixed}) {
    SecurityScenario s = scenario(ScenarioKind::InterceptResend);
    s.substitute = policy;
    const std::size_t rounds = 8000;
    const CheckResult c = run_check_rounds(s, secrets, rounds, 21);
    const double expected = expected_detection_rate(s, secrets);
    EXPECT_NEAR(c.detection_rate, expected, three_sigma(expected, rounds)) << to_string(policy);
    EXPECT_LE(c.ci.low, c.detection_rate);
    EXPECT_GE(c.ci.high, c.detection_rate);
  }
}

TEST(Security, InterceptByReceiverGoesUnnoticed) {
  const SecurityReport r = simulate_scenario(scenario(ScenarioKind::InterceptResend, 1, 1), haar_sampler(), 500, 22);
  EXPECT_EQ(r.success_rate, 1.0);
  EXPECT_EQ(r.flagged, 0u);
}

TEST(Security, InterceptLeavesAliceStatisticsUniform) {
  const auto table = protocol::derive_correction_table(protocol::PartyLayout(2), 6);
  std::map<std::string, int> counts;
  SplitRng root(23);
  const int n = 3200;
  for (int i = 0; i < n; ++i) {
    SplitRng rng = root.split("trial", static_cast<std::uint64_t>(i));
    const TrialOutcome o = simulate_trial(scenario(ScenarioKind::InterceptResend), SecretAmplitudes{0.6, 0.8}, table, rng);
    EXPECT_NEAR(o.alice_probability, 1.0 / 16, 1e-10);
    ++counts[o.alice_outcome];
  }
  ASSERT_EQ(counts.size(), 16u);
  for (const auto& [outcome, c] : counts) EXPECT_NEAR(c / double(n), 1.0 / 16, three_sigma(1.0 / 16, n)) << outcome;
}

TEST(Security, ThreadCountDoesNotChangeReport) {
  const SecurityScenario s = scenario(ScenarioKind::InterceptResend);
  const SecurityReport a = simulate_scenario(s, haar_sampler(), 400, 24, 1);
  const SecurityReport b = simulate_scenario(s, haar_sampler(), 400, 24, 4);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.flagged, b.flagged);
  EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
}

TEST(Security, LargerGroupsRecoverHonestly) {
  SecurityScenario s = scenario(ScenarioKind::Honest);
  s.users = 3;
  const SecurityReport r = simulate_scenario(s, haar_sampler(), 100, 25);
  EXPECT_EQ(r.success_rate, 1.0);
}

TEST(Wilson, IntervalProperties) {
  const Interval i = wilson_interval(50, 100);
  EXPECT_LT(i.low, 0.5);
  EXPECT_GT(i.high, 0.5);
  EXPECT_NEAR(i.low + i.high, 1.0, 1e-12);
  EXPECT_NEAR(i.low, 0.4038, 1e-4);
  const Interval all = wilson_interval(1000, 1000);
  EXPECT_NEAR(all.high, 1.0, 1e-12);
  EXPECT_GT(all.low, 0.99);
  const Interval none = wilson_interval(0, 1000);
  EXPECT_NEAR(none.low, 0.0, 1e-12);
}
