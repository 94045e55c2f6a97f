#pragma once

#include "qss/protocol.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qss::security {

enum class ScenarioKind {
  Honest,
  AssignedWithCooperation,     // adversary is the receiver, everyone cooperates
  AssignedWithoutCooperation,  // adversary is the receiver, one user withholds
  LieAboutX,                   // adversary reports the opposite X outcome
  InterceptResend,             // adversary swaps a user's atom for a substitute
};

enum class SubstitutePolicy { Ground, MaximallyMixed, RandomPure };

std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(std::string_view name);
std::string to_string(SubstitutePolicy policy);
std::optional<SubstitutePolicy> parse_policy(std::string_view name);

struct SecurityScenario {
  ScenarioKind kind = ScenarioKind::Honest;
  int users = 2;
  int adversary = 1;                 // user index, never Alice
  std::optional<int> receiver;       // user index; defaulted per kind
  SubstitutePolicy substitute = SubstitutePolicy::Ground;

  /// Receiver user index after applying the per-kind default.
  int resolved_receiver() const;
  /// User whose atom is intercepted (InterceptResend) or who withholds
  /// (AssignedWithoutCooperation).
  int counterpart() const;

  void validate() const;
};

using SecretSampler = std::function<protocol::SecretAmplitudes(SplitRng&)>;

SecretSampler haar_sampler();
SecretSampler fixed_sampler(protocol::SecretAmplitudes secret);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval at z = 1.959964 (95%).
Interval wilson_interval(std::size_t successes, std::size_t trials);

/// What one protocol run looks like under an adversary.
struct TrialOutcome {
  protocol::SecretAmplitudes secret;
  std::string alice_outcome;
  double alice_probability = 0.0;
  std::string true_x;       // X outcomes actually obtained, non-receivers ascending
  std::string announced_x;  // what the receiver acted on
  Correction correction = Correction::I;
  DensityMatrix receiver_state;     // receiver's atom after correction
  double receiver_fidelity = 0.0;   // <secret| rho |secret>
  double adversary_fidelity = 0.0;  // best state the adversary ends up holding
  bool adversary_guessed = false;   // AssignedWithoutCooperation only
  bool guess_correct = true;

  TrialOutcome();
};

TrialOutcome simulate_trial(const SecurityScenario& scenario, const protocol::SecretAmplitudes& secret,
                            const protocol::CorrectionTable& table, SplitRng& rng);

struct SecurityReport {
  SecurityScenario scenario;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  Interval success_ci;
  double mean_fidelity = 0.0;
  double adversary_success_rate = 0.0;
  std::size_t check_rounds = 0;
  std::size_t flagged = 0;
  double detection_rate = 0.0;
  Interval detection_ci;
  std::uint64_t seed = 0;
};

/// Runs `trials` independent protocol executions with the adversary
/// injected. Trial i draws from split("trial", i). Scenarios with a public
/// check (Honest, LieAboutX, InterceptResend) treat every trial as a check
/// round.
SecurityReport simulate_scenario(const SecurityScenario& scenario, const SecretSampler& secret_sampler,
                                 std::size_t trials, std::uint64_t seed, unsigned threads = 1);

struct CheckResult {
  std::size_t rounds = 0;
  std::size_t flagged = 0;
  double detection_rate = 0.0;
  Interval ci;
};

/// Alice reveals a known secret; the receiver measures {secret, secret-perp}
/// and a perp outcome flags the round. Round r uses known_secrets[r % size].
CheckResult run_check_rounds(const SecurityScenario& scenario,
                             const std::vector<protocol::SecretAmplitudes>& known_secrets, std::size_t rounds,
                             std::uint64_t seed, unsigned threads = 1);

/// Branch-weighted mismatch probability averaged over `secrets`, computed by
/// exhaustive enumeration. RandomPure substitutes are replaced by their
/// ensemble average (the maximally mixed state).
double expected_detection_rate(const SecurityScenario& scenario,
                               const std::vector<protocol::SecretAmplitudes>& secrets);

}  // namespace qss::security
