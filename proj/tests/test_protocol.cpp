#include "oracles.hpp"

#include "qss/gates.hpp"
#include "qss/protocol.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace qss;
using namespace qss::protocol;
using cavity::InteractionSchedule;

namespace {

SecretAmplitudes secret_from(SplitRng& rng) { return SecretAmplitudes::haar(rng); }

Vector as_vector(const PureState& s) { return s.amplitudes(); }

PureState post_interaction(const SecretAmplitudes& s, const PartyLayout& layout) {
  return apply_interactions(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
}

// Tables are deterministic; build each once.
const CorrectionTable& table_for(int users, SiteLabel receiver) {
  static std::map<std::pair<int, SiteLabel>, CorrectionTable> cache;
  auto it = cache.find({users, receiver});
  if (it == cache.end()) {
    it = cache.emplace(std::pair{users, receiver}, derive_correction_table(PartyLayout(users), receiver)).first;
  }
  return it->second;
}

}  // namespace

TEST(PartyLayout, ThreePartyFixture) {
  const PartyLayout l(2);
  EXPECT_EQ(l.measured(), (std::vector<SiteLabel>{1, 2, 3, 5}));
  EXPECT_EQ(l.distributed(), (std::vector<SiteLabel>{4, 6}));
  EXPECT_EQ(l.cavity_pairs(), (std::vector<std::pair<SiteLabel, SiteLabel>>{{1, 2}, {3, 5}}));
  EXPECT_EQ(l.bell_pair(), (std::pair<SiteLabel, SiteLabel>{5, 6}));
  EXPECT_EQ(l.user_atom(1), 4);
  EXPECT_EQ(l.user_atom(2), 6);
  EXPECT_EQ(l.user_of(6), 2);
  EXPECT_THROW(l.user_of(5), LabelError);
  EXPECT_EQ(l.non_receivers(6), (std::vector<SiteLabel>{4}));
  EXPECT_THROW(l.non_receivers(5), Error);
}

TEST(PartyLayout, PartitionsAtomsForLargerGroups) {
  for (int n = 2; n <= 5; ++n) {
    const PartyLayout l(n);
    std::vector<SiteLabel> all = l.measured();
    all.insert(all.end(), l.distributed().begin(), l.distributed().end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(static_cast<int>(all.size()), 3 * n);
    for (int a = 1; a <= 3 * n; ++a) EXPECT_EQ(all[static_cast<std::size_t>(a - 1)], a);
    EXPECT_EQ(static_cast<int>(l.distributed().size()), n);
    EXPECT_EQ(static_cast<int>(l.cavity_pairs().size()), n);
    EXPECT_EQ(static_cast<int>(l.ghz_triples().size()), n - 1);
  }
  EXPECT_THROW(PartyLayout(1), Error);
}

TEST(SecretAmplitudes, RejectsUnnormalized) {
  EXPECT_THROW((SecretAmplitudes{0.9, 0.0}.validate()), Error);
  EXPECT_NO_THROW((SecretAmplitudes{0.6, Complex(0, 0.8)}.validate()));
}

TEST(PrepareInitial, MatchesExpandedProduct) {
  SplitRng rng(31);
  for (int n : {2, 3}) {
    const SecretAmplitudes s = secret_from(rng);
    const PureState psi = prepare_initial(s, PartyLayout(n));
    const oracle::Ket expected = oracle::initial_state(n, s.alpha, s.beta);
    double covered = 0.0;
    for (const auto& [levels, amp] : expected) {
      EXPECT_NEAR(std::abs(psi.amplitude(levels) - amp), 0.0, 1e-15) << levels;
      covered += std::norm(amp);
    }
    EXPECT_NEAR(covered, 1.0, 1e-12);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  }
}

TEST(PrepareInitial, EightNonzeroAmplitudesForThreeParties) {
  const SecretAmplitudes s{0.6, 0.8};
  const PureState psi = prepare_initial(s, PartyLayout(2));
  int nonzero = 0;
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
    const Complex a = psi.amplitudes()[i];
    if (std::abs(a) < 1e-15) continue;
    ++nonzero;
    EXPECT_TRUE(std::abs(a - s.alpha / 2.0) < 1e-15 || std::abs(a - s.beta / 2.0) < 1e-15);
  }
  EXPECT_EQ(nonzero, 8);
}

TEST(Distribution, MatchesBruteForceExpansion) {
  SplitRng rng(32);
  for (int n : {2, 3}) {
    const PartyLayout layout(n);
    const SecretAmplitudes s = secret_from(rng);
    const auto branches = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
    const auto expected = oracle::distribute(n, s.alpha, s.beta);
    ASSERT_EQ(branches.size(), expected.size());
    for (const auto& b : branches) {
      const auto it = expected.find(b.alice_outcome);
      ASSERT_NE(it, expected.end()) << b.alice_outcome;
      EXPECT_NEAR(b.probability, it->second.probability, 1e-12);
      EXPECT_EQ(b.residual.labels(), layout.distributed());
      EXPECT_NEAR(oracle::overlap(as_vector(b.residual), it->second.residual), 1.0, 1e-12);
    }
  }
}

TEST(Distribution, AllOutcomesEquallyLikely) {
  SplitRng rng(33);
  const PartyLayout layout(2);
  for (int i = 0; i < 20; ++i) {
    const auto branches =
        distribute_exhaustive(prepare_initial(secret_from(rng), layout), layout, InteractionSchedule::canonical());
    ASSERT_EQ(branches.size(), 16u);
    for (const auto& b : branches) EXPECT_NEAR(b.probability, 1.0 / 16, 1e-10);
  }
}

TEST(Distribution, AllExcitedBranchResidual) {
  SplitRng rng(34);
  const PartyLayout layout(2);
  for (int i = 0; i < 20; ++i) {
    const SecretAmplitudes s = secret_from(rng);
    const auto branches = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
    const auto it = std::find_if(branches.begin(), branches.end(), [](const auto& b) { return b.alice_outcome == "eeee"; });
    ASSERT_NE(it, branches.end());
    Vector expected = Vector::Zero(4);
    expected[3] = s.alpha;
    expected[0] = -s.beta;
    EXPECT_GE(oracle::overlap(it->residual.amplitudes(), expected), 1 - 1e-10);
  }
}

TEST(Distribution, AllGroundBranchResidual) {
  // |gggg>: both pairs flipped back, residual alpha|gg> - beta|ee> up to phase
  const SecretAmplitudes s{0.6, Complex(0, 0.8)};
  const PartyLayout layout(2);
  const auto branches = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
  const auto expected = oracle::distribute(2, s.alpha, s.beta).at("gggg");
  EXPECT_NEAR(oracle::overlap(branches.front().residual.amplitudes(), expected.residual), 1.0, 1e-12);
  EXPECT_EQ(branches.front().alice_outcome, "gggg");
}

TEST(Distribution, SampledDrawsFromEnumeratedBranches) {
  const PartyLayout layout(2);
  const SecretAmplitudes s{0.6, 0.8};
  SplitRng rng(35);
  std::map<std::string, int> counts;
  for (int i = 0; i < 1600; ++i) {
    SplitRng t = rng.split("trial", static_cast<std::uint64_t>(i));
    const DistributionBranch b = distribute_sampled(prepare_initial(s, layout), layout, InteractionSchedule::canonical(), t);
    EXPECT_NEAR(b.probability, 1.0 / 16, 1e-10);
    ++counts[b.alice_outcome];
  }
  EXPECT_EQ(counts.size(), 16u);
}

TEST(CorrectionTable, ThreePartyEntries) {
  const CorrectionTable& t = table_for(2, 6);
  EXPECT_EQ(t.size(), 32u);
  EXPECT_EQ(t.lookup({"eeee", "+"}), Correction::Z);
  EXPECT_EQ(t.lookup({"eeee", "-"}), Correction::I);
  EXPECT_THROW(t.lookup({"eeee", "++"}), Error);
  EXPECT_FALSE(t.find({"xxxx", "+"}).has_value());
  for (const auto& [key, c] : t.entries()) EXPECT_TRUE(is_pauli(c)) << key.alice << "/" << key.x;
}

TEST(CorrectionTable, SizesGrowWithUsers) {
  EXPECT_EQ(table_for(3, 9).size(), 256u);
  EXPECT_EQ(table_for(4, 12).size(), 2048u);
  for (const auto& [key, c] : table_for(4, 12).entries()) EXPECT_TRUE(is_pauli(c));
}

TEST(CorrectionTable, OddGroupNeedsQuarterPhase) {
  const CorrectionTable& t = table_for(3, 9);
  bool quarter = false;
  for (const auto& [key, c] : t.entries()) quarter |= !is_pauli(c);
  EXPECT_TRUE(quarter);
  EXPECT_EQ(t.lookup({std::string(6, 'e'), "++"}), Correction::Sdg);
}

TEST(CorrectionTable, ClosedFormAgreesForEveryReceiver) {
  for (int n : {2, 3, 4}) {
    const PartyLayout layout(n);
    for (SiteLabel receiver : layout.distributed()) {
      const CorrectionTable& t = table_for(n, receiver);
      for (const auto& [key, c] : t.entries()) {
        ASSERT_EQ(closed_form_correction(layout, receiver, key), c)
            << "n=" << n << " receiver=" << receiver << " " << key.alice << "/" << key.x;
      }
    }
  }
}

TEST(CorrectionTable, ConstructorRejectsBadReceiver) {
  EXPECT_THROW(derive_correction_table(PartyLayout(2), 5), Error);
}

TEST(Recovery, AnnouncedBranchChainThreeParties) {
  SplitRng rng(36);
  const PartyLayout layout(2);
  for (int i = 0; i < 10; ++i) {
    const SecretAmplitudes s = secret_from(rng);
    const auto branches = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
    const PureState& residual = std::find_if(branches.begin(), branches.end(), [](const auto& b) {
                                  return b.alice_outcome == "eeee";
                                })->residual;
    // X+ on atom 4 leaves alpha|e> - beta|g> on atom 6
    const SiteLabel bob[] = {4};
    const Projection px = project(residual, bob, MeasurementBasis::X, "+");
    ASSERT_TRUE(px.possible());
    EXPECT_NEAR(px.probability, 0.5, 1e-12);
    EXPECT_GE(fidelity_up_to_phase(*px.collapsed, PureState::atom(6, s.alpha, -s.beta)), 1 - 1e-10);
    const PureState fixed = apply_unitary(*px.collapsed, gates::sigma_z(), {6});
    EXPECT_GE(fidelity_up_to_phase(fixed, s.as_state(6)), 1 - 1e-10);
  }
}

TEST(Recovery, SkippingCorrectionCostsPhase) {
  SplitRng rng(37);
  const PartyLayout layout(2);
  for (int i = 0; i < 10; ++i) {
    const SecretAmplitudes s = secret_from(rng);
    const auto branches = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
    const SiteLabel bob[] = {4};
    const Projection px = project(branches.back().residual, bob, MeasurementBasis::X, "+");
    ASSERT_EQ(branches.back().alice_outcome, "eeee");
    const double expected = std::pow(std::norm(s.alpha) - std::norm(s.beta), 2);
    EXPECT_NEAR(fidelity_up_to_phase(*px.collapsed, s.as_state(6)), expected, 1e-12);
  }
}

TEST(Recovery, EveryBranchEveryReceiver) {
  SplitRng rng(38);
  for (int n : {2, 3, 4}) {
    const PartyLayout layout(n);
    for (SiteLabel receiver : layout.distributed()) {
      const SecretAmplitudes s = secret_from(rng);
      const ProtocolTranscript t = run_exhaustive(s, layout, receiver, table_for(n, receiver));
      EXPECT_EQ(t.branches.size(), std::size_t{1} << (2 * n - 1 + n))
          << "n=" << n;  // 2^(2n) Alice outcomes x 2^(n-1) X outcomes, all possible
      EXPECT_GE(t.min_fidelity(), 1 - tol::kRecovery) << "n=" << n << " receiver=" << receiver;
      EXPECT_NEAR(t.total_probability(), 1.0, 1e-10);
    }
  }
}

TEST(Recovery, SampledTrialIsDeterministic) {
  const PartyLayout layout(3);
  const SecretAmplitudes s{0.6, Complex(0, 0.8)};
  const ProtocolTranscript a = run_full_trial(s, layout, 9, 1234, table_for(3, 9));
  const ProtocolTranscript b = run_full_trial(s, layout, 9, 1234, table_for(3, 9));
  ASSERT_EQ(a.branches.size(), 1u);
  EXPECT_EQ(a.branches[0].alice_outcome, b.branches[0].alice_outcome);
  EXPECT_EQ(a.branches[0].x_outcome, b.branches[0].x_outcome);
  EXPECT_EQ(a.events.size(), b.events.size());
  EXPECT_GE(a.min_fidelity(), 1 - tol::kRecovery);
}

TEST(Recovery, MistimedInteractionDegradesFidelity) {
  const PartyLayout layout(2);
  InteractionSchedule off = InteractionSchedule::canonical();
  off.lambda_t += 0.05;
  const ProtocolTranscript t = run_exhaustive(SecretAmplitudes{0.6, 0.8}, layout, 6, table_for(2, 6), off);
  EXPECT_LT(t.mean_fidelity(), 1.0 - 1e-4);
  EXPECT_NEAR(t.total_probability(), 1.0, 1e-10);
}

TEST(Transcript, EventSequence) {
  const ProtocolTranscript t = run_full_trial(SecretAmplitudes{0.6, 0.8}, PartyLayout(2), 6, 5, table_for(2, 6));
  std::vector<EventKind> kinds;
  for (const auto& e : t.events) kinds.push_back(e.kind);
  const std::vector<EventKind> expected = {EventKind::Prepare, EventKind::Interact, EventKind::Interact,
                                           EventKind::AliceMeasure, EventKind::Announce, EventKind::XMeasure,
                                           EventKind::Announce, EventKind::Correct, EventKind::Recover};
  EXPECT_EQ(kinds, expected);
}

// ----------------------------------------------------------------- properties

class ProtocolProperties : public ::testing::TestWithParam<int> {};

TEST_P(ProtocolProperties, PairOrderDoesNotMatter) {
  SplitRng rng = SplitRng(300).split("order", static_cast<std::uint64_t>(GetParam()));
  const PartyLayout layout(3);
  const PureState psi = prepare_initial(secret_from(rng), layout);
  const PureState a = apply_interactions(psi, layout, InteractionSchedule::canonical());
  const PureState b = apply_interactions(psi, layout, InteractionSchedule::canonical(), {2, 0, 1});
  EXPECT_LT((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(ProtocolProperties, ReceiverCannotSeePhase) {
  SplitRng rng = SplitRng(301).split("signal", static_cast<std::uint64_t>(GetParam()));
  const int n = 2 + GetParam() % 2;
  const PartyLayout layout(n);
  const SecretAmplitudes s = secret_from(rng);
  const SecretAmplitudes flipped{s.alpha, -s.beta};
  for (SiteLabel receiver : layout.distributed()) {
    const std::vector<SiteLabel> keep = {receiver};
    const DensityMatrix a = partial_trace(post_interaction(s, layout), keep);
    const DensityMatrix b = partial_trace(post_interaction(flipped, layout), keep);
    EXPECT_LT((a.entries() - b.entries()).cwiseAbs().maxCoeff(), 1e-10);
  }
  // also after Alice's announcement, before any X outcome
  const auto ba = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
  const auto bb = distribute_exhaustive(prepare_initial(flipped, layout), layout, InteractionSchedule::canonical());
  ASSERT_EQ(ba.size(), bb.size());
  const std::vector<SiteLabel> keep = {layout.distributed().back()};
  for (std::size_t i = 0; i < ba.size(); ++i) {
    const Matrix diff = partial_trace(ba[i].residual, keep).entries() - partial_trace(bb[i].residual, keep).entries();
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-10) << ba[i].alice_outcome;
  }
}

TEST_P(ProtocolProperties, ReceiverHoldsAmplitudesOnly) {
  SplitRng rng = SplitRng(302).split("leak", static_cast<std::uint64_t>(GetParam()));
  const PartyLayout layout(2);
  const SecretAmplitudes s = secret_from(rng);
  const auto branches = distribute_exhaustive(prepare_initial(s, layout), layout, InteractionSchedule::canonical());
  const DensityMatrix rho = partial_trace(branches.back().residual, std::vector<SiteLabel>{6});
  // (g, e) order: diag(|beta|^2, |alpha|^2), no coherence
  EXPECT_NEAR(rho.entries()(1, 1).real(), std::norm(s.alpha), 1e-10);
  EXPECT_NEAR(rho.entries()(0, 0).real(), std::norm(s.beta), 1e-10);
  EXPECT_NEAR(std::abs(rho.entries()(0, 1)), 0.0, 1e-10);
}

TEST_P(ProtocolProperties, BranchProbabilitiesComplete) {
  SplitRng rng = SplitRng(303).split("complete", static_cast<std::uint64_t>(GetParam()));
  const int n = 2 + GetParam() % 3;
  const PartyLayout layout(n);
  double total = 0.0;
  for (const auto& b : distribute_exhaustive(prepare_initial(secret_from(rng), layout), layout,
                                             InteractionSchedule::canonical())) {
    total += b.probability;
  }
  EXPECT_NEAR(total, 1.0, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Random, ProtocolProperties, ::testing::Range(0, 100));
