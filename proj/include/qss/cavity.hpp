#pragma once

#include "qss/rng.hpp"
#include "qss/state.hpp"
#include "qss/types.hpp"

#include <cstdint>
#include <vector>

namespace qss::cavity {

/// Physical parameters of one driven two-atom cavity. All frequencies are
/// angular (rad / time).
struct CavityParams {
  double g = 1.0;            // atom-cavity coupling
  double delta = 20.0;       // omega0 - omega1, positive
  double omega_rabi = 400.0; // classical drive Rabi frequency
  double omega0 = 1000.0;    // atomic transition
  double omega1 = 980.0;     // cavity
  double omega2 = 1000.0;    // drive, equal to omega0
  int fock_cutoff = 8;       // max photon number kept
  int detuning_sign = +1;    // -1 flips the cavity detuning term (sensitivity studies)

  /// g^2 / (2 delta).
  double lambda() const { return g * g / (2.0 * delta); }

  /// Throws qss::Error when an invariant is violated.
  void validate() const;

  /// g = 1 and the given ratios; omega0 = omega2 = base, omega1 = base - delta.
  static CavityParams from_ratios(double delta_over_g, double omega_over_delta, int fock_cutoff,
                                  double base_frequency = 1000.0);
};

/// Interaction time together with the two dimensionless phases that define
/// the effective evolution.
struct InteractionSchedule {
  double t = 0.0;
  double lambda_t = 0.0;
  double omega_t = 0.0;

  /// lambda t = pi/4, Omega t = pi. `t` is left at 0 (unbound).
  static InteractionSchedule canonical();

  /// Schedule implied by running `params` for time t.
  static InteractionSchedule bind(const CavityParams& params, double t);

  /// True when lambda_t and omega_t match params at this t within 1e-12.
  bool consistent_with(const CavityParams& params) const;
};

/// lambda (I + sx sx): the two-atom reduction of the effective Hamiltonian.
Matrix effective_hamiltonian(double lambda);

/// Omega (sx I + I sx).
Matrix drive_hamiltonian(double omega_rabi);

/// exp(-i H0 t) exp(-i Heff t) in closed form, 4x4 over (first, second) atom.
Matrix effective_unitary(const InteractionSchedule& schedule);

/// Time-independent Hamiltonian in the frame rotating at omega0 = omega2:
///   -delta a^dag a + sum_j [ g (a^dag S_j^- + a S_j^+) + Omega (S_j^+ + S_j^-) ]
/// Basis order is (cavity, atom 1, atom 2), cavity slowest.
Matrix full_hamiltonian(const CavityParams& params);

/// Dimension-matched annihilation operator on the truncated Fock space.
Matrix annihilation(int fock_cutoff);

inline constexpr double kLeakThreshold = 1e-6;

struct FullEvolution {
  PureState state;
  double leak = 0.0;  // population of |F> at the final time
  bool leak_flagged = false;
};

/// Spectral propagator for H_rot. Built once per parameter set.
class FullPropagator {
 public:
  explicit FullPropagator(const CavityParams& params);

  const CavityParams& params() const noexcept { return params_; }

  /// exp(-i H_rot t) as a dense matrix.
  Matrix propagator(double t) const;

  /// Evolves a state over {cavity, atom, atom}.
  FullEvolution evolve(const PureState& initial, double t) const;

 private:
  CavityParams params_;
  Eigen::VectorXd energies_;
  Matrix eigenvectors_;
};

/// One-off full evolution. `initial` must contain the cavity site (label
/// kCavityLabel, dimension F+1) and exactly two atoms.
FullEvolution full_evolution(const CavityParams& params, double t, const PureState& initial);

/// atoms (x) |0>_cavity.
PureState with_cavity_vacuum(const PureState& atoms, int fock_cutoff);

struct LadderPoint {
  double delta_over_g = 0.0;
  double omega_over_delta = 0.0;
};

struct ValidationPoint {
  double delta_over_g = 0.0;
  double omega_over_delta = 0.0;
  int fock_cutoff = 0;
  double deviation = 0.0;  // 1 - mean <psi_eff| rho_atoms |psi_eff>
  double leak = 0.0;       // max over samples
};

struct ValidationReport {
  std::vector<ValidationPoint> ladder;
  int samples = 0;
  std::uint64_t seed = 0;

  bool leak_warning() const;
};

std::vector<LadderPoint> default_ladder();

/// Compares the full rotating-frame model against effective_unitary at
/// t = pi / (4 lambda) for Haar-random two-atom inputs. Sample s of point p
/// draws from the stream split("validate", p).split("sample", s).
ValidationReport validate_effective(const std::vector<LadderPoint>& ladder, int fock_cutoff, int samples,
                                    std::uint64_t seed, unsigned threads = 1, int detuning_sign = +1);

}  // namespace qss::cavity
