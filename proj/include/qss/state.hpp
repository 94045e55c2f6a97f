#pragma once

#include "qss/rng.hpp"
#include "qss/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qss {

enum class MeasurementBasis { Z, X };

std::string to_string(MeasurementBasis basis);

/// Dense pure state over a labeled register.
///
/// Sites are kept sorted by label; amplitudes use the big-endian layout of
/// qss/basis.hpp. A register with no sites holds a single amplitude (the
/// leftover phase after measuring everything).
class PureState {
 public:
  PureState();

  /// Validates dims, labels and amplitude length. Does not normalize.
  PureState(std::vector<SiteLabel> labels, std::vector<int> dims, Vector amplitudes);

  /// One two-level atom in amp_e|e> + amp_g|g>.
  static PureState atom(SiteLabel label, Complex amp_e, Complex amp_g);

  /// Computational basis state; `levels` holds one 'g'/'e' per atom label.
  static PureState basis_state(std::vector<SiteLabel> labels, const std::string& levels);

  /// Fock state |n> of a single truncated mode.
  static PureState fock(SiteLabel label, int cutoff, int photons);

  const std::vector<SiteLabel>& labels() const noexcept { return labels_; }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Vector& amplitudes() noexcept { return amplitudes_; }

  std::size_t site_count() const noexcept { return labels_.size(); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }

  bool has_site(SiteLabel label) const;
  std::size_t position(SiteLabel label) const;  // throws LabelError
  int dim_of(SiteLabel label) const;

  double norm() const;
  void normalize();

  Complex amplitude(const std::string& levels) const;

 private:
  std::vector<SiteLabel> labels_;
  std::vector<int> dims_;
  Vector amplitudes_;
};

/// Density matrix over a labeled register, same layout as PureState.
class DensityMatrix {
 public:
  DensityMatrix(std::vector<SiteLabel> labels, std::vector<int> dims, Matrix entries);

  static DensityMatrix from_pure(const PureState& state);
  static DensityMatrix maximally_mixed(SiteLabel label);

  const std::vector<SiteLabel>& labels() const noexcept { return labels_; }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const Matrix& entries() const noexcept { return entries_; }

  double trace() const;
  double purity() const;
  Eigen::VectorXd eigenvalues() const;  // ascending

  /// <psi|rho|psi>; psi must live on the same register.
  double overlap(const PureState& psi) const;

  /// Throws unless Hermitian, unit trace and PSD within tol::kCheck.
  void check_physical() const;

 private:
  std::vector<SiteLabel> labels_;
  std::vector<int> dims_;
  Matrix entries_;
};

struct MeasurementRecord {
  std::vector<SiteLabel> sites;
  MeasurementBasis basis = MeasurementBasis::Z;
  std::string outcome;  // Z: 'g'/'e' per site, X: '+'/'-' per site
  double probability = 0.0;
};

/// Result of a projective measurement onto one outcome. `collapsed` is empty
/// when the outcome has zero probability.
struct Projection {
  double probability = 0.0;
  std::optional<PureState> collapsed;

  bool possible() const noexcept { return collapsed.has_value(); }
};

PureState tensor(std::span<const PureState> states);
PureState tensor(std::initializer_list<PureState> states);

/// Applies `u` to the target sites. The first target is the slowest index of
/// `u`. Checks unitarity within tol::kCheck.
PureState apply_unitary(const PureState& state, const Matrix& u, std::span<const SiteLabel> targets);
PureState apply_unitary(const PureState& state, const Matrix& u, std::initializer_list<SiteLabel> targets);

/// Projects `sites` onto `outcome` in the given basis, removing them from the
/// register. Only two-level sites can be measured.
Projection project(const PureState& state, std::span<const SiteLabel> sites, MeasurementBasis basis,
                   const std::string& outcome);

/// All outcomes of measuring `sites`, in basis-index order (g before e, + before -).
std::vector<std::string> all_outcomes(std::size_t site_count, MeasurementBasis basis);

/// Draws an outcome from the Born distribution.
std::pair<MeasurementRecord, PureState> sample_measurement(const PureState& state,
                                                           std::span<const SiteLabel> sites,
                                                           MeasurementBasis basis, SplitRng& rng);

Complex inner_product(const PureState& a, const PureState& b);

/// |<a|b>|^2. Requires identical labels and dims.
double fidelity_up_to_phase(const PureState& a, const PureState& b);

DensityMatrix partial_trace(const PureState& state, std::span<const SiteLabel> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const SiteLabel> keep);

/// ||u^dag u - I|| (Frobenius).
double unitarity_deviation(const Matrix& u);

/// Haar-random pure state of the given dimension.
Vector haar_vector(int dimension, SplitRng& rng);

}  // namespace qss
