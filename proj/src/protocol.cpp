#include "qss/protocol.hpp"

#include "qss/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace qss::protocol {

namespace {

constexpr std::uint64_t kTableSeed = 0x7ab1e5eedULL;

PureState ghz_state(const std::array<SiteLabel, 3>& atoms) {
  Vector v = Vector::Zero(8);
  v[0] = 1.0 / std::sqrt(2.0);  // ggg
  v[7] = 1.0 / std::sqrt(2.0);  // eee
  return PureState({atoms[0], atoms[1], atoms[2]}, {2, 2, 2}, std::move(v));
}

PureState bell_state(SiteLabel first, SiteLabel second) {
  Vector v = Vector::Zero(4);
  v[0] = 1.0 / std::sqrt(2.0);  // gg
  v[3] = 1.0 / std::sqrt(2.0);  // ee
  return PureState({first, second}, {2, 2}, std::move(v));
}

struct SequentialMeasurement {
  std::vector<double> probabilities;  // conditional, one per site
  std::optional<PureState> state;
  double joint() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), 1.0, std::multiplies<>());
  }
};

// Measures sites one at a time so every step has its conditional probability.
SequentialMeasurement measure_in_sequence(const PureState& state, const std::vector<SiteLabel>& sites,
                                          MeasurementBasis basis, const std::string& outcome) {
  SequentialMeasurement result;
  PureState current = state;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const SiteLabel site[] = {sites[i]};
    Projection p = project(current, site, basis, std::string(1, outcome[i]));
    result.probabilities.push_back(p.probability);
    if (!p.possible()) return result;
    current = std::move(*p.collapsed);
  }
  result.state = std::move(current);
  return result;
}

void check_normalized(const PureState& state) {
  const double n = state.norm();
  if (std::abs(n - 1.0) > tol::kCheck) throw Error("protocol input is not normalized: norm " + std::to_string(n));
}

void check_receiver(const PartyLayout& layout, SiteLabel receiver) {
  const auto& d = layout.distributed();
  if (std::find(d.begin(), d.end(), receiver) == d.end()) {
    throw LabelError("receiver must be one of the distributed atoms", receiver);
  }
}

RecoveryBranch finish_recovery(const PureState& receiver_state, const std::string& alice_outcome,
                               const std::string& x_outcome, SiteLabel receiver, const CorrectionTable& table,
                               const SecretAmplitudes& secret) {
  RecoveryBranch branch;
  branch.x_outcome = x_outcome;
  branch.correction = table.lookup({alice_outcome, x_outcome});
  const SiteLabel target[] = {receiver};
  branch.recovered = apply_unitary(receiver_state, correction_matrix(branch.correction), target);
  branch.fidelity = fidelity_up_to_phase(branch.recovered, secret.as_state(receiver));
  return branch;
}

}  // namespace

// ------------------------------------------------------------------ secret

void SecretAmplitudes::validate() const {
  if (std::abs(norm_squared() - 1.0) > tol::kIdentity) {
    throw Error("secret violates |alpha|^2 + |beta|^2 = 1 (got " + std::to_string(norm_squared()) + ")");
  }
}

PureState SecretAmplitudes::as_state(SiteLabel label) const { return PureState::atom(label, alpha, beta); }

SecretAmplitudes SecretAmplitudes::haar(SplitRng& rng) {
  const Vector v = haar_vector(2, rng);
  return {v[0], v[1]};
}

// ------------------------------------------------------------------ layout

PartyLayout::PartyLayout(int users) : users_(users) {
  if (users < 2) throw Error("party layout needs at least two users, got " + std::to_string(users));
  if (3 * users > 60) throw Error("party layout: too many users for a dense state vector");
  pairs_.emplace_back(1, 2);
  for (int k = 2; k <= users; ++k) pairs_.emplace_back(3 * k - 3, 3 * k - 1);
  for (int k = 2; k <= users; ++k) distributed_.push_back(3 * k - 2);
  distributed_.push_back(3 * users);
  for (int k = 1; k <= users - 1; ++k) ghz_.push_back({3 * k - 1, 3 * k, 3 * k + 1});
  for (const auto& [a, b] : pairs_) {
    measured_.push_back(a);
    measured_.push_back(b);
  }
  std::sort(measured_.begin(), measured_.end());

  std::set<SiteLabel> all(measured_.begin(), measured_.end());
  all.insert(distributed_.begin(), distributed_.end());
  if (all.size() != static_cast<std::size_t>(atom_count()) || *all.begin() != 1 || *all.rbegin() != atom_count()) {
    throw Error("party layout does not partition the atoms");
  }
}

SiteLabel PartyLayout::user_atom(int user) const {
  if (user < 1 || user > users_) throw Error("user index out of range: " + std::to_string(user));
  return distributed_[static_cast<std::size_t>(user - 1)];
}

int PartyLayout::user_of(SiteLabel atom) const {
  auto it = std::find(distributed_.begin(), distributed_.end(), atom);
  if (it == distributed_.end()) throw LabelError("atom is not held by a user", atom);
  return static_cast<int>(it - distributed_.begin()) + 1;
}

std::vector<SiteLabel> PartyLayout::non_receivers(SiteLabel receiver) const {
  check_receiver(*this, receiver);
  std::vector<SiteLabel> out;
  for (SiteLabel a : distributed_) {
    if (a != receiver) out.push_back(a);
  }
  return out;
}

// ------------------------------------------------------------------- table

CorrectionTable::CorrectionTable(int users, SiteLabel receiver, std::map<BranchKey, Correction> entries)
    : users_(users), receiver_(receiver), entries_(std::move(entries)) {}

Correction CorrectionTable::lookup(const BranchKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error("correction table has no entry for alice=" + key.alice + " x=" + key.x);
  }
  return it->second;
}

std::optional<Correction> CorrectionTable::find(const BranchKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string to_string(Mode mode) { return mode == Mode::Exhaustive ? "exhaustive" : "sampled"; }

// ------------------------------------------------------------- operations

PureState prepare_initial(const SecretAmplitudes& secret, const PartyLayout& layout) {
  secret.validate();
  std::vector<PureState> parts;
  parts.push_back(secret.as_state(1));
  for (const auto& triple : layout.ghz_triples()) parts.push_back(ghz_state(triple));
  const auto [b1, b2] = layout.bell_pair();
  parts.push_back(bell_state(b1, b2));
  return tensor(parts);
}

PureState apply_interactions(const PureState& state, const PartyLayout& layout,
                             const cavity::InteractionSchedule& schedule, const std::vector<std::size_t>& order) {
  const Matrix u = cavity::effective_unitary(schedule);
  std::vector<std::size_t> sequence = order;
  if (sequence.empty()) {
    sequence.resize(layout.cavity_pairs().size());
    std::iota(sequence.begin(), sequence.end(), 0);
  }
  PureState out = state;
  for (std::size_t idx : sequence) {
    const auto [a, b] = layout.cavity_pairs().at(idx);
    out = apply_unitary(out, u, {a, b});
  }
  return out;
}

std::vector<DistributionBranch> distribute_exhaustive(const PureState& state, const PartyLayout& layout,
                                                      const cavity::InteractionSchedule& schedule) {
  check_normalized(state);
  const PureState evolved = apply_interactions(state, layout, schedule);
  std::vector<DistributionBranch> branches;
  for (const auto& outcome : all_outcomes(layout.measured().size(), MeasurementBasis::Z)) {
    Projection p = project(evolved, layout.measured(), MeasurementBasis::Z, outcome);
    if (!p.possible()) continue;
    branches.push_back({outcome, p.probability, std::move(*p.collapsed)});
  }
  return branches;
}

DistributionBranch distribute_sampled(const PureState& state, const PartyLayout& layout,
                                      const cavity::InteractionSchedule& schedule, SplitRng& rng) {
  check_normalized(state);
  const PureState evolved = apply_interactions(state, layout, schedule);
  auto [record, residual] = sample_measurement(evolved, layout.measured(), MeasurementBasis::Z, rng);
  return {record.outcome, record.probability, std::move(residual)};
}

CorrectionTable derive_correction_table(const PartyLayout& layout, SiteLabel receiver,
                                        const cavity::InteractionSchedule& schedule) {
  check_receiver(layout, receiver);
  const std::vector<SiteLabel> others = layout.non_receivers(receiver);

  SplitRng rng(kTableSeed);
  std::vector<SecretAmplitudes> secrets;
  std::vector<PureState> evolved;
  for (int i = 0; i < 2; ++i) {
    SplitRng stream = rng.split("table-secret", static_cast<std::uint64_t>(i));
    secrets.push_back(SecretAmplitudes::haar(stream));
    evolved.push_back(apply_interactions(prepare_initial(secrets.back(), layout), layout, schedule));
  }

  std::map<BranchKey, Correction> entries;
  const auto x_outcomes = all_outcomes(others.size(), MeasurementBasis::X);
  for (const auto& alice : all_outcomes(layout.measured().size(), MeasurementBasis::Z)) {
    // receiver states per x outcome, one per secret where the branch exists
    std::vector<std::vector<std::pair<std::size_t, PureState>>> candidates(x_outcomes.size());
    for (std::size_t s = 0; s < secrets.size(); ++s) {
      Projection pa = project(evolved[s], layout.measured(), MeasurementBasis::Z, alice);
      if (!pa.possible()) continue;
      for (std::size_t xi = 0; xi < x_outcomes.size(); ++xi) {
        Projection px = project(*pa.collapsed, others, MeasurementBasis::X, x_outcomes[xi]);
        if (px.possible()) candidates[xi].emplace_back(s, std::move(*px.collapsed));
      }
    }
    for (std::size_t xi = 0; xi < x_outcomes.size(); ++xi) {
      if (candidates[xi].empty()) continue;
      std::optional<Correction> found;
      for (Correction c : kCorrectionOrder) {
        const Matrix m = correction_matrix(c);
        const bool works = std::all_of(candidates[xi].begin(), candidates[xi].end(), [&](const auto& entry) {
          const SiteLabel target[] = {receiver};
          const PureState fixed = apply_unitary(entry.second, m, target);
          return fidelity_up_to_phase(fixed, secrets[entry.first].as_state(receiver)) >= 1.0 - tol::kRecovery;
        });
        if (works) {
          found = c;
          break;
        }
      }
      if (!found) {
        throw Error("no single-atom correction recovers branch alice=" + alice + " x=" + x_outcomes[xi]);
      }
      entries.emplace(BranchKey{alice, x_outcomes[xi]}, *found);
    }
  }
  return CorrectionTable(layout.users(), receiver, std::move(entries));
}

Correction closed_form_correction(const PartyLayout& layout, SiteLabel receiver, const BranchKey& key) {
  check_receiver(layout, receiver);
  const auto& measured = layout.measured();
  const std::vector<SiteLabel> others = layout.non_receivers(receiver);
  if (key.alice.size() != measured.size() || key.x.size() != others.size()) {
    throw Error("closed_form_correction: key does not match the layout");
  }
  std::map<SiteLabel, int> m;
  for (std::size_t i = 0; i < measured.size(); ++i) m[measured[i]] = key.alice[i] == basis::kExcitedChar ? 1 : 0;

  // Unflipped branch: pair 0 leaves (1, 2) as measured. Each later pair's flip
  // bit follows from the shared GHZ value it touches.
  const auto& pairs = layout.cavity_pairs();
  std::map<SiteLabel, int> value;  // distributed atom -> level in the unflipped term
  int flips = 0;
  int previous_flip = 0;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const int ghz_value = m[pairs[k - 1].second] ^ previous_flip;
    const int flip = ghz_value ^ m[pairs[k].first];
    value[static_cast<SiteLabel>(3 * (k + 1) - 2)] = ghz_value;
    flips += flip;
    previous_flip = flip;
  }
  value[3 * layout.users()] = m[pairs.back().second] ^ previous_flip;

  // rho = (-i)^(n - 2 S) * prod(x)
  int exponent = ((layout.users() - 2 * flips) % 4 + 4) % 4;
  const Complex minus_i{0.0, -1.0};
  Complex rho = std::pow(minus_i, exponent);
  for (char c : key.x) {
    if (c == basis::kMinusChar) rho = -rho;
  }
  const double arg = std::round(std::arg(rho) / (std::numbers::pi / 2)) * (std::numbers::pi / 2);

  const int secret_level = m[1];
  const bool need_x = value.at(receiver) != secret_level;
  // Phase applied on |g> (before X when X is needed).
  const double theta = (secret_level == 1) != need_x ? -arg : arg;
  const int quarter = ((static_cast<int>(std::lround(theta / (std::numbers::pi / 2))) % 4) + 4) % 4;
  static constexpr Correction plain[] = {Correction::I, Correction::S, Correction::Z, Correction::Sdg};
  static constexpr Correction with_x[] = {Correction::X, Correction::XS, Correction::XZ, Correction::XSdg};
  return need_x ? with_x[quarter] : plain[quarter];
}

std::vector<RecoveryBranch> recover_exhaustive(const PureState& residual, const std::string& alice_outcome,
                                               const PartyLayout& layout, SiteLabel receiver,
                                               const CorrectionTable& table, const SecretAmplitudes& secret) {
  const std::vector<SiteLabel> others = layout.non_receivers(receiver);
  std::vector<RecoveryBranch> out;
  for (const auto& x : all_outcomes(others.size(), MeasurementBasis::X)) {
    SequentialMeasurement seq = measure_in_sequence(residual, others, MeasurementBasis::X, x);
    if (!seq.state) continue;
    RecoveryBranch branch = finish_recovery(*seq.state, alice_outcome, x, receiver, table, secret);
    branch.probability = seq.joint();
    out.push_back(std::move(branch));
  }
  return out;
}

RecoveryBranch recover_sampled(const PureState& residual, const std::string& alice_outcome,
                               const PartyLayout& layout, SiteLabel receiver, const CorrectionTable& table,
                               const SecretAmplitudes& secret, SplitRng& rng) {
  const std::vector<SiteLabel> others = layout.non_receivers(receiver);
  PureState current = residual;
  std::string x;
  double probability = 1.0;
  for (SiteLabel site : others) {
    SplitRng stream = rng.split("x-measure", static_cast<std::uint64_t>(site));
    const SiteLabel sites[] = {site};
    auto [record, collapsed] = sample_measurement(current, sites, MeasurementBasis::X, stream);
    x += record.outcome;
    probability *= record.probability;
    current = std::move(collapsed);
  }
  RecoveryBranch branch = finish_recovery(current, alice_outcome, x, receiver, table, secret);
  branch.probability = probability;
  return branch;
}

// -------------------------------------------------------------- transcript

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Prepare: return "prepare";
    case EventKind::Interact: return "interact";
    case EventKind::AliceMeasure: return "alice_measure";
    case EventKind::Announce: return "announce";
    case EventKind::XMeasure: return "x_measure";
    case EventKind::Correct: return "correct";
    case EventKind::Recover: return "recover";
  }
  return "?";
}

double ProtocolTranscript::min_fidelity() const {
  double f = 1.0;
  for (const auto& b : branches) f = std::min(f, b.fidelity);
  return branches.empty() ? 0.0 : f;
}

double ProtocolTranscript::mean_fidelity() const {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& b : branches) {
    weighted += b.probability * b.fidelity;
    total += b.probability;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

double ProtocolTranscript::total_probability() const {
  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  return total;
}

namespace {

void record_setup(ProtocolTranscript& t, const PartyLayout& layout) {
  std::vector<SiteLabel> atoms(static_cast<std::size_t>(layout.atom_count()));
  std::iota(atoms.begin(), atoms.end(), 1);
  TranscriptEvent prepare;
  prepare.kind = EventKind::Prepare;
  prepare.sites = std::move(atoms);
  t.events.push_back(std::move(prepare));
  for (const auto& [a, b] : layout.cavity_pairs()) {
    TranscriptEvent interact;
    interact.kind = EventKind::Interact;
    interact.sites = {a, b};
    t.events.push_back(std::move(interact));
  }
}

void record_branch(ProtocolTranscript& t, int branch, const PartyLayout& layout, SiteLabel receiver,
                   const std::string& alice, double alice_prob, const std::string& x,
                   const std::vector<double>& x_probs, Correction correction, double fidelity) {
  TranscriptEvent measure;
  measure.kind = EventKind::AliceMeasure;
  measure.branch = branch;
  measure.sites = layout.measured();
  measure.outcome = alice;
  measure.probability = alice_prob;
  t.events.push_back(measure);

  TranscriptEvent announce;
  announce.kind = EventKind::Announce;
  announce.branch = branch;
  announce.message = alice;
  t.events.push_back(announce);

  const auto others = layout.non_receivers(receiver);
  for (std::size_t i = 0; i < others.size(); ++i) {
    TranscriptEvent xm;
    xm.kind = EventKind::XMeasure;
    xm.branch = branch;
    xm.sites = {others[i]};
    xm.user = layout.user_of(others[i]);
    xm.outcome = std::string(1, x[i]);
    xm.probability = x_probs[i];
    t.events.push_back(xm);

    TranscriptEvent tell;
    tell.kind = EventKind::Announce;
    tell.branch = branch;
    tell.user = xm.user;
    tell.message = xm.outcome;
    t.events.push_back(tell);
  }

  TranscriptEvent correct;
  correct.kind = EventKind::Correct;
  correct.branch = branch;
  correct.sites = {receiver};
  correct.user = layout.user_of(receiver);
  correct.outcome = to_string(correction);
  t.events.push_back(correct);

  TranscriptEvent recover;
  recover.kind = EventKind::Recover;
  recover.branch = branch;
  recover.sites = {receiver};
  recover.user = correct.user;
  recover.fidelity = fidelity;
  t.events.push_back(recover);

  double joint = alice_prob;
  for (double p : x_probs) joint *= p;
  t.branches.push_back({alice, x, joint, correction, fidelity});
}

}  // namespace

ProtocolTranscript run_full_trial(const SecretAmplitudes& secret, const PartyLayout& layout, SiteLabel receiver,
                                  std::uint64_t seed, const CorrectionTable& table,
                                  const cavity::InteractionSchedule& schedule) {
  check_receiver(layout, receiver);
  ProtocolTranscript t;
  t.users = layout.users();
  t.receiver = receiver;
  t.schedule = schedule;
  t.mode = Mode::Sampled;
  t.seed = seed;
  record_setup(t, layout);

  SplitRng rng(seed);
  SplitRng alice_stream = rng.split("alice");
  const DistributionBranch dist = distribute_sampled(prepare_initial(secret, layout), layout, schedule, alice_stream);

  const auto others = layout.non_receivers(receiver);
  PureState current = dist.residual;
  std::string x;
  std::vector<double> x_probs;
  SplitRng x_stream = rng.split("recover");
  for (SiteLabel site : others) {
    SplitRng stream = x_stream.split("x-measure", static_cast<std::uint64_t>(site));
    const SiteLabel sites[] = {site};
    auto [record, collapsed] = sample_measurement(current, sites, MeasurementBasis::X, stream);
    x += record.outcome;
    x_probs.push_back(record.probability);
    current = std::move(collapsed);
  }
  const RecoveryBranch rb = finish_recovery(current, dist.alice_outcome, x, receiver, table, secret);
  record_branch(t, 1, layout, receiver, dist.alice_outcome, dist.probability, x, x_probs, rb.correction,
                rb.fidelity);
  return t;
}

ProtocolTranscript run_exhaustive(const SecretAmplitudes& secret, const PartyLayout& layout, SiteLabel receiver,
                                  const CorrectionTable& table, const cavity::InteractionSchedule& schedule) {
  check_receiver(layout, receiver);
  ProtocolTranscript t;
  t.users = layout.users();
  t.receiver = receiver;
  t.schedule = schedule;
  t.mode = Mode::Exhaustive;
  record_setup(t, layout);

  const auto others = layout.non_receivers(receiver);
  int branch = 0;
  for (const DistributionBranch& dist : distribute_exhaustive(prepare_initial(secret, layout), layout, schedule)) {
    for (const auto& x : all_outcomes(others.size(), MeasurementBasis::X)) {
      SequentialMeasurement seq = measure_in_sequence(dist.residual, others, MeasurementBasis::X, x);
      if (!seq.state) continue;
      const RecoveryBranch rb = finish_recovery(*seq.state, dist.alice_outcome, x, receiver, table, secret);
      record_branch(t, ++branch, layout, receiver, dist.alice_outcome, dist.probability, x, seq.probabilities,
                    rb.correction, rb.fidelity);
    }
  }
  return t;
}

}  // namespace qss::protocol
