#include "qss/security.hpp"

#include "qss/basis.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace qss::security {

using protocol::CorrectionTable;
using protocol::PartyLayout;
using protocol::SecretAmplitudes;

namespace {

constexpr double kWilsonZ = 1.959963984540054;

bool has_check_rounds(ScenarioKind kind) {
  return kind == ScenarioKind::Honest || kind == ScenarioKind::LieAboutX || kind == ScenarioKind::InterceptResend;
}

char flip_x(char c) { return c == basis::kPlusChar ? basis::kMinusChar : basis::kPlusChar; }

DensityMatrix substitute_state(SubstitutePolicy policy, SiteLabel label, SplitRng& rng) {
  switch (policy) {
    case SubstitutePolicy::Ground:
      return DensityMatrix::from_pure(PureState::atom(label, 0.0, 1.0));
    case SubstitutePolicy::MaximallyMixed:
      return DensityMatrix::maximally_mixed(label);
    case SubstitutePolicy::RandomPure:
      return DensityMatrix::from_pure(PureState({label}, {2}, haar_vector(2, rng)));
  }
  throw Error("unknown substitute policy");
}

DensityMatrix conjugate(const DensityMatrix& rho, const Matrix& u) {
  return DensityMatrix(rho.labels(), rho.dims(), u * rho.entries() * u.adjoint());
}

PureState x_eigenstate(SiteLabel label, char outcome) {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState::atom(label, r, outcome == basis::kPlusChar ? r : -r);
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Honest: return "honest";
    case ScenarioKind::AssignedWithCooperation: return "assigned_with_cooperation";
    case ScenarioKind::AssignedWithoutCooperation: return "assigned_without_cooperation";
    case ScenarioKind::LieAboutX: return "lie_about_x";
    case ScenarioKind::InterceptResend: return "intercept_resend";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) {
  if (name == "honest") return ScenarioKind::Honest;
  if (name == "a" || name == "assigned_with_cooperation") return ScenarioKind::AssignedWithCooperation;
  if (name == "b" || name == "assigned_without_cooperation") return ScenarioKind::AssignedWithoutCooperation;
  if (name == "c" || name == "lie" || name == "lie_about_x") return ScenarioKind::LieAboutX;
  if (name == "d" || name == "intercept" || name == "intercept_resend") return ScenarioKind::InterceptResend;
  return std::nullopt;
}

std::string to_string(SubstitutePolicy policy) {
  switch (policy) {
    case SubstitutePolicy::Ground: return "ground";
    case SubstitutePolicy::MaximallyMixed: return "maximally_mixed";
    case SubstitutePolicy::RandomPure: return "random_pure";
  }
  return "?";
}

std::optional<SubstitutePolicy> parse_policy(std::string_view name) {
  if (name == "ground" || name == "g") return SubstitutePolicy::Ground;
  if (name == "mixed" || name == "maximally_mixed") return SubstitutePolicy::MaximallyMixed;
  if (name == "random-pure" || name == "random_pure") return SubstitutePolicy::RandomPure;
  return std::nullopt;
}

int SecurityScenario::resolved_receiver() const {
  if (receiver) return *receiver;
  switch (kind) {
    case ScenarioKind::AssignedWithCooperation:
    case ScenarioKind::AssignedWithoutCooperation:
      return adversary;
    case ScenarioKind::Honest:
      return users;
    case ScenarioKind::LieAboutX:
    case ScenarioKind::InterceptResend:
      return adversary == users ? users - 1 : users;
  }
  return users;
}

int SecurityScenario::counterpart() const {
  const int r = resolved_receiver();
  switch (kind) {
    case ScenarioKind::AssignedWithoutCooperation:
      return adversary == 1 ? 2 : 1;
    case ScenarioKind::InterceptResend:
      if (r != adversary) return r;
      return adversary == users ? users - 1 : users;
    default:
      return r;
  }
}

void SecurityScenario::validate() const {
  if (users < 2) throw Error("security scenario needs at least two users");
  if (adversary < 1 || adversary > users) throw Error("adversary must be a user (1.." + std::to_string(users) + ")");
  const int r = resolved_receiver();
  if (r < 1 || r > users) throw Error("receiver must be a user (1.." + std::to_string(users) + ")");
  if ((kind == ScenarioKind::AssignedWithCooperation || kind == ScenarioKind::AssignedWithoutCooperation) &&
      r != adversary) {
    throw Error(to_string(kind) + " requires the adversary to be the assigned receiver");
  }
  if (kind == ScenarioKind::LieAboutX && r == adversary) {
    throw Error("lie_about_x requires the adversary to be a non-receiver");
  }
}

SecretSampler haar_sampler() {
  return [](SplitRng& rng) { return SecretAmplitudes::haar(rng); };
}

SecretSampler fixed_sampler(SecretAmplitudes secret) {
  secret.validate();
  return [secret](SplitRng&) { return secret; };
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci{std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0)};
  ci.low = std::min(ci.low, p);
  ci.high = std::max(ci.high, p);
  return ci;
}

TrialOutcome::TrialOutcome() : receiver_state(DensityMatrix::maximally_mixed(0)) {}

TrialOutcome simulate_trial(const SecurityScenario& scenario, const SecretAmplitudes& secret,
                            const CorrectionTable& table, SplitRng& rng) {
  scenario.validate();
  const PartyLayout layout(scenario.users);
  const SiteLabel receiver = layout.user_atom(scenario.resolved_receiver());
  const SiteLabel adversary = layout.user_atom(scenario.adversary);
  if (table.receiver() != receiver || table.users() != scenario.users) {
    throw Error("correction table does not match the scenario's receiver");
  }
  const auto others = layout.non_receivers(receiver);
  auto slot_of = [&](SiteLabel atom) {
    return static_cast<std::size_t>(std::find(others.begin(), others.end(), atom) - others.begin());
  };

  TrialOutcome out;
  out.secret = secret;
  SplitRng alice_stream = rng.split("alice");
  const auto dist = protocol::distribute_sampled(protocol::prepare_initial(secret, layout), layout,
                                                 cavity::InteractionSchedule::canonical(), alice_stream);
  out.alice_outcome = dist.alice_outcome;
  out.alice_probability = dist.probability;

  // Every genuine non-receiver atom is X-measured, by its owner or by the
  // adversary holding it.
  PureState genuine = dist.residual;
  for (SiteLabel site : others) {
    SplitRng stream = rng.split("x-measure", static_cast<std::uint64_t>(site));
    const SiteLabel sites[] = {site};
    auto [record, collapsed] = sample_measurement(genuine, sites, MeasurementBasis::X, stream);
    out.true_x += record.outcome;
    genuine = std::move(collapsed);
  }
  out.announced_x = out.true_x;

  const PureState target = secret.as_state(receiver);
  switch (scenario.kind) {
    case ScenarioKind::Honest:
    case ScenarioKind::AssignedWithCooperation:
      break;
    case ScenarioKind::AssignedWithoutCooperation: {
      const std::size_t slot = slot_of(layout.user_atom(scenario.counterpart()));
      SplitRng guess_stream = rng.split("guess");
      const char guess = guess_stream.coin() ? basis::kPlusChar : basis::kMinusChar;
      out.adversary_guessed = true;
      out.guess_correct = guess == out.true_x[slot];
      out.announced_x[slot] = guess;
      break;
    }
    case ScenarioKind::LieAboutX: {
      const std::size_t slot = slot_of(adversary);
      out.announced_x[slot] = flip_x(out.true_x[slot]);
      break;
    }
    case ScenarioKind::InterceptResend:
      break;
  }

  out.correction = table.lookup({out.alice_outcome, out.announced_x});
  const Matrix fix = correction_matrix(out.correction);
  const SiteLabel recv_site[] = {receiver};
  const PureState corrected = apply_unitary(genuine, fix, recv_site);

  if (scenario.kind == ScenarioKind::InterceptResend && scenario.resolved_receiver() != scenario.adversary) {
    SplitRng sub_stream = rng.split("substitute");
    const DensityMatrix substitute = substitute_state(scenario.substitute, receiver, sub_stream);
    out.receiver_state = conjugate(substitute, fix);
    out.adversary_fidelity = fidelity_up_to_phase(corrected, target);
  } else {
    out.receiver_state = DensityMatrix::from_pure(corrected);
  }
  out.receiver_fidelity = std::clamp(out.receiver_state.overlap(target), 0.0, 1.0);

  switch (scenario.kind) {
    case ScenarioKind::Honest:
      out.adversary_fidelity = 0.0;
      break;
    case ScenarioKind::AssignedWithCooperation:
    case ScenarioKind::AssignedWithoutCooperation:
      out.adversary_fidelity = out.receiver_fidelity;
      break;
    case ScenarioKind::LieAboutX: {
      // The adversary is left holding an X eigenstate of his own atom.
      const char own = out.true_x[slot_of(adversary)];
      out.adversary_fidelity = fidelity_up_to_phase(x_eigenstate(adversary, own), secret.as_state(adversary));
      break;
    }
    case ScenarioKind::InterceptResend:
      if (scenario.resolved_receiver() == scenario.adversary) out.adversary_fidelity = out.receiver_fidelity;
      break;
  }
  return out;
}

namespace {

struct TrialTally {
  bool success = false;
  bool adversary_success = false;
  bool flagged = false;
  double fidelity = 0.0;
};

bool check_round_flags(const TrialOutcome& outcome, SplitRng& rng) {
  // Receiver measures {secret, secret-perp}; perp occurs with 1 - F.
  return rng.uniform() < 1.0 - outcome.receiver_fidelity;
}

}  // namespace

SecurityReport simulate_scenario(const SecurityScenario& scenario, const SecretSampler& secret_sampler,
                                 std::size_t trials, std::uint64_t seed, unsigned threads) {
  scenario.validate();
  if (trials == 0) throw Error("simulate_scenario: trials must be positive");
  const PartyLayout layout(scenario.users);
  const CorrectionTable table =
      protocol::derive_correction_table(layout, layout.user_atom(scenario.resolved_receiver()));
  const SplitRng root(seed);
  const bool checks = has_check_rounds(scenario.kind);

  std::vector<TrialTally> tallies(trials);
  detail::parallel_for(trials, threads, [&](std::size_t i) {
    SplitRng trial = root.split("trial", i);
    SplitRng secret_stream = trial.split("secret");
    const SecretAmplitudes secret = secret_sampler(secret_stream);
    SplitRng protocol_stream = trial.split("protocol");
    const TrialOutcome outcome = simulate_trial(scenario, secret, table, protocol_stream);
    TrialTally& t = tallies[i];
    t.fidelity = outcome.receiver_fidelity;
    t.success = outcome.receiver_fidelity >= 1.0 - tol::kRecovery;
    t.adversary_success = outcome.adversary_fidelity >= 1.0 - tol::kRecovery;
    if (checks) {
      SplitRng check_stream = trial.split("check");
      t.flagged = check_round_flags(outcome, check_stream);
    }
  });

  SecurityReport report;
  report.scenario = scenario;
  report.trials = trials;
  report.seed = seed;
  double fidelity_sum = 0.0;
  std::size_t adversary_successes = 0;
  for (const auto& t : tallies) {
    report.successes += t.success ? 1 : 0;
    adversary_successes += t.adversary_success ? 1 : 0;
    report.flagged += t.flagged ? 1 : 0;
    fidelity_sum += t.fidelity;
  }
  const double n = static_cast<double>(trials);
  report.success_rate = static_cast<double>(report.successes) / n;
  report.success_ci = wilson_interval(report.successes, trials);
  report.mean_fidelity = fidelity_sum / n;
  report.adversary_success_rate = static_cast<double>(adversary_successes) / n;
  if (checks) {
    report.check_rounds = trials;
    report.detection_rate = static_cast<double>(report.flagged) / n;
    report.detection_ci = wilson_interval(report.flagged, trials);
  }
  return report;
}

CheckResult run_check_rounds(const SecurityScenario& scenario, const std::vector<SecretAmplitudes>& known_secrets,
                             std::size_t rounds, std::uint64_t seed, unsigned threads) {
  scenario.validate();
  if (!has_check_rounds(scenario.kind)) {
    throw Error("check rounds are defined for honest, lie_about_x and intercept_resend only");
  }
  if (known_secrets.empty()) throw Error("run_check_rounds: no known secrets");
  for (const auto& s : known_secrets) s.validate();

  const PartyLayout layout(scenario.users);
  const CorrectionTable table =
      protocol::derive_correction_table(layout, layout.user_atom(scenario.resolved_receiver()));
  const SplitRng root(seed);
  std::vector<char> flags(rounds, 0);
  detail::parallel_for(rounds, threads, [&](std::size_t r) {
    SplitRng round = root.split("check-round", r);
    SplitRng protocol_stream = round.split("protocol");
    const TrialOutcome outcome =
        simulate_trial(scenario, known_secrets[r % known_secrets.size()], table, protocol_stream);
    SplitRng check_stream = round.split("check");
    flags[r] = check_round_flags(outcome, check_stream) ? 1 : 0;
  });

  CheckResult result;
  result.rounds = rounds;
  result.flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  result.detection_rate = rounds ? static_cast<double>(result.flagged) / static_cast<double>(rounds) : 0.0;
  result.ci = wilson_interval(result.flagged, rounds);
  return result;
}

double expected_detection_rate(const SecurityScenario& scenario, const std::vector<SecretAmplitudes>& secrets) {
  scenario.validate();
  if (!has_check_rounds(scenario.kind)) {
    throw Error("expected_detection_rate: scenario has no check rounds");
  }
  if (secrets.empty()) throw Error("expected_detection_rate: no secrets");
  const PartyLayout layout(scenario.users);
  const SiteLabel receiver = layout.user_atom(scenario.resolved_receiver());
  const SiteLabel adversary = layout.user_atom(scenario.adversary);
  const CorrectionTable table = protocol::derive_correction_table(layout, receiver);
  const auto others = layout.non_receivers(receiver);
  const bool substituted =
      scenario.kind == ScenarioKind::InterceptResend && scenario.resolved_receiver() != scenario.adversary;
  const DensityMatrix substitute =
      scenario.substitute == SubstitutePolicy::Ground
          ? DensityMatrix::from_pure(PureState::atom(receiver, 0.0, 1.0))
          : DensityMatrix::maximally_mixed(receiver);

  double total = 0.0;
  for (const auto& secret : secrets) {
    const PureState target = secret.as_state(receiver);
    double mismatch = 0.0;
    for (const auto& dist : protocol::distribute_exhaustive(protocol::prepare_initial(secret, layout), layout,
                                                            cavity::InteractionSchedule::canonical())) {
      for (const auto& x : all_outcomes(others.size(), MeasurementBasis::X)) {
        Projection px = project(dist.residual, others, MeasurementBasis::X, x);
        if (!px.possible()) continue;
        std::string announced = x;
        if (scenario.kind == ScenarioKind::LieAboutX) {
          const auto slot = static_cast<std::size_t>(std::find(others.begin(), others.end(), adversary) - others.begin());
          announced[slot] = flip_x(announced[slot]);
        }
        const Matrix fix = correction_matrix(table.lookup({dist.alice_outcome, announced}));
        const DensityMatrix rho = substituted ? conjugate(substitute, fix)
                                              : DensityMatrix::from_pure(apply_unitary(*px.collapsed, fix, {receiver}));
        mismatch += dist.probability * px.probability * (1.0 - rho.overlap(target));
      }
    }
    total += mismatch;
  }
  return total / static_cast<double>(secrets.size());
}

}  // namespace qss::security
