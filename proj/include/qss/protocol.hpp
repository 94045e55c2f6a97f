#pragma once

#include "qss/cavity.hpp"
#include "qss/gates.hpp"
#include "qss/rng.hpp"
#include "qss/state.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qss::protocol {

/// The secret alpha|e> + beta|g>.
struct SecretAmplitudes {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};

  double norm_squared() const { return std::norm(alpha) + std::norm(beta); }

  /// Throws unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
  void validate() const;

  PureState as_state(SiteLabel label) const;

  static SecretAmplitudes haar(SplitRng& rng);
};

/// Atom bookkeeping for n users (n = 2 is the Alice/Bob/Charlie case).
///
/// Atoms are 1..3n. Atom 1 holds the secret, (n-1) GHZ triples sit on
/// (3k-1, 3k, 3k+1), the Bell pair on (3n-1, 3n). Cavity pairs are (1,2) and
/// (3k-3, 3k-1) for k = 2..n; users receive 3k-2 for k = 2..n and 3n.
class PartyLayout {
 public:
  explicit PartyLayout(int users);

  int users() const noexcept { return users_; }
  int atom_count() const noexcept { return 3 * users_; }

  const std::vector<std::pair<SiteLabel, SiteLabel>>& cavity_pairs() const noexcept { return pairs_; }
  const std::vector<SiteLabel>& distributed() const noexcept { return distributed_; }
  const std::vector<SiteLabel>& measured() const noexcept { return measured_; }
  const std::vector<std::array<SiteLabel, 3>>& ghz_triples() const noexcept { return ghz_; }
  std::pair<SiteLabel, SiteLabel> bell_pair() const noexcept { return {3 * users_ - 1, 3 * users_}; }

  /// Atom of user `user` (1-based, in ascending atom order).
  SiteLabel user_atom(int user) const;
  /// Inverse of user_atom; throws for atoms Alice keeps.
  int user_of(SiteLabel atom) const;

  /// Distributed atoms other than `receiver`, ascending.
  std::vector<SiteLabel> non_receivers(SiteLabel receiver) const;

 private:
  int users_;
  std::vector<std::pair<SiteLabel, SiteLabel>> pairs_;
  std::vector<SiteLabel> distributed_;
  std::vector<SiteLabel> measured_;
  std::vector<std::array<SiteLabel, 3>> ghz_;
};

struct BranchKey {
  std::string alice;  // 'g'/'e' over measured atoms, ascending
  std::string x;      // '+'/'-' over non-receivers, ascending

  auto operator<=>(const BranchKey&) const = default;
};

class CorrectionTable {
 public:
  CorrectionTable(int users, SiteLabel receiver, std::map<BranchKey, Correction> entries);

  int users() const noexcept { return users_; }
  SiteLabel receiver() const noexcept { return receiver_; }
  const std::map<BranchKey, Correction>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Throws qss::Error for a missing key.
  Correction lookup(const BranchKey& key) const;
  std::optional<Correction> find(const BranchKey& key) const;

 private:
  int users_;
  SiteLabel receiver_;
  std::map<BranchKey, Correction> entries_;
};

enum class Mode { Exhaustive, Sampled };

std::string to_string(Mode mode);

/// Secret (x) GHZ triples (x) Bell pair.
PureState prepare_initial(const SecretAmplitudes& secret, const PartyLayout& layout);

/// Applies the effective cavity unitary to every pair. `order` optionally
/// permutes the pair sequence (indices into layout.cavity_pairs()).
PureState apply_interactions(const PureState& state, const PartyLayout& layout,
                             const cavity::InteractionSchedule& schedule,
                             const std::vector<std::size_t>& order = {});

struct DistributionBranch {
  std::string alice_outcome;
  double probability = 0.0;
  PureState residual;  // over the distributed atoms
};

/// Interactions followed by Alice's Z measurement of every cavity atom.
/// Returns every possible outcome, in basis-index order.
std::vector<DistributionBranch> distribute_exhaustive(const PureState& state, const PartyLayout& layout,
                                                      const cavity::InteractionSchedule& schedule);

/// Same as above but draws one outcome.
DistributionBranch distribute_sampled(const PureState& state, const PartyLayout& layout,
                                      const cavity::InteractionSchedule& schedule, SplitRng& rng);

/// Builds the receiver's correction table by brute force over every branch.
/// Throws qss::Error if some branch admits no correction.
CorrectionTable derive_correction_table(const PartyLayout& layout, SiteLabel receiver,
                                        const cavity::InteractionSchedule& schedule =
                                            cavity::InteractionSchedule::canonical());

/// Closed-form rule for the canonical schedule, used to cross-check the
/// brute-force table. The residual is c(m1)|v> + rho c(~m1)|~v> with
/// rho = (-i)^(n - 2 S) * prod(x), where S counts flipped pairs in the
/// unflipped term.
Correction closed_form_correction(const PartyLayout& layout, SiteLabel receiver, const BranchKey& key);

struct RecoveryBranch {
  std::string x_outcome;
  double probability = 0.0;  // conditional on the Alice outcome
  Correction correction = Correction::I;
  PureState recovered;
  double fidelity = 0.0;
};

/// Non-receivers measure X, the receiver applies the tabulated correction.
std::vector<RecoveryBranch> recover_exhaustive(const PureState& residual, const std::string& alice_outcome,
                                               const PartyLayout& layout, SiteLabel receiver,
                                               const CorrectionTable& table, const SecretAmplitudes& secret);

RecoveryBranch recover_sampled(const PureState& residual, const std::string& alice_outcome,
                               const PartyLayout& layout, SiteLabel receiver, const CorrectionTable& table,
                               const SecretAmplitudes& secret, SplitRng& rng);

enum class EventKind { Prepare, Interact, AliceMeasure, Announce, XMeasure, Correct, Recover };

std::string to_string(EventKind kind);

struct TranscriptEvent {
  EventKind kind = EventKind::Prepare;
  int branch = 0;                // branch index in exhaustive mode, 0 otherwise
  std::vector<SiteLabel> sites;  // atoms involved
  std::string outcome;           // measurement outcome or correction label
  double probability = 1.0;
  int user = 0;                  // acting user, 0 for Alice
  std::string message;           // announce payload
  double fidelity = 0.0;
};

struct BranchSummary {
  std::string alice_outcome;
  std::string x_outcome;
  double probability = 0.0;  // joint
  Correction correction = Correction::I;
  double fidelity = 0.0;
};

struct ProtocolTranscript {
  int users = 0;
  SiteLabel receiver = 0;
  cavity::InteractionSchedule schedule;
  Mode mode = Mode::Sampled;
  std::uint64_t seed = 0;
  std::vector<TranscriptEvent> events;
  std::vector<BranchSummary> branches;

  double min_fidelity() const;
  double mean_fidelity() const;  // probability weighted
  double total_probability() const;
};

/// prepare -> distribute -> recover, drawing every outcome from `seed`.
ProtocolTranscript run_full_trial(const SecretAmplitudes& secret, const PartyLayout& layout, SiteLabel receiver,
                                  std::uint64_t seed, const CorrectionTable& table,
                                  const cavity::InteractionSchedule& schedule =
                                      cavity::InteractionSchedule::canonical());

/// Enumerates every (Alice, X) branch.
ProtocolTranscript run_exhaustive(const SecretAmplitudes& secret, const PartyLayout& layout, SiteLabel receiver,
                                  const CorrectionTable& table,
                                  const cavity::InteractionSchedule& schedule =
                                      cavity::InteractionSchedule::canonical());

}  // namespace qss::protocol
