#include "qss/cavity.hpp"

#include "qss/gates.hpp"
#include "parallel.hpp"

#include <cmath>
#include <numbers>

namespace qss::cavity {

using std::numbers::pi;

namespace {

Matrix lowering() {
  // S^- = |g><e|
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

}  // namespace

void CavityParams::validate() const {
  if (!(g > 0.0)) throw Error("cavity params: g must be positive");
  if (!(delta > 0.0)) throw Error("cavity params: delta must be positive");
  if (!(omega_rabi > 0.0)) throw Error("cavity params: omega_rabi must be positive");
  if (omega0 != omega2) throw Error("cavity params: omega0 must equal omega2");
  if (std::abs((omega0 - omega1) - delta) > 1e-9 * std::max(1.0, std::abs(omega0))) {
    throw Error("cavity params: delta must equal omega0 - omega1");
  }
  if (fock_cutoff < 2) throw Error("cavity params: fock_cutoff must be at least 2");
  if (detuning_sign != 1 && detuning_sign != -1) throw Error("cavity params: detuning_sign must be +1 or -1");
}

CavityParams CavityParams::from_ratios(double delta_over_g, double omega_over_delta, int fock_cutoff,
                                       double base_frequency) {
  CavityParams p;
  p.g = 1.0;
  p.delta = delta_over_g * p.g;
  p.omega_rabi = omega_over_delta * p.delta;
  p.omega0 = base_frequency;
  p.omega2 = base_frequency;
  p.omega1 = base_frequency - p.delta;
  p.fock_cutoff = fock_cutoff;
  p.validate();
  return p;
}

InteractionSchedule InteractionSchedule::canonical() { return {0.0, pi / 4, pi}; }

InteractionSchedule InteractionSchedule::bind(const CavityParams& params, double t) {
  return {t, params.lambda() * t, params.omega_rabi * t};
}

bool InteractionSchedule::consistent_with(const CavityParams& params) const {
  return std::abs(lambda_t - params.lambda() * t) <= tol::kIdentity * std::max(1.0, std::abs(lambda_t)) &&
         std::abs(omega_t - params.omega_rabi * t) <= tol::kIdentity * std::max(1.0, std::abs(omega_t));
}

Matrix effective_hamiltonian(double lambda) {
  const Matrix xx = gates::kron(gates::sigma_x(), gates::sigma_x());
  return lambda * (Matrix::Identity(4, 4) + xx);
}

Matrix drive_hamiltonian(double omega_rabi) {
  const Matrix i2 = gates::identity(2);
  return omega_rabi * (gates::kron(gates::sigma_x(), i2) + gates::kron(i2, gates::sigma_x()));
}

Matrix effective_unitary(const InteractionSchedule& schedule) {
  const Complex i{0.0, 1.0};
  // exp(-i w sx) = cos w - i sin w sx on each atom
  const Matrix single = std::cos(schedule.omega_t) * gates::identity(2) - i * std::sin(schedule.omega_t) * gates::sigma_x();
  const Matrix drive = gates::kron(single, single);
  // exp(-i l (I + sx sx)) = e^{-i l}(cos l - i sin l sx sx)
  const Matrix xx = gates::kron(gates::sigma_x(), gates::sigma_x());
  const Matrix coupling = std::exp(-i * schedule.lambda_t) *
                          (std::cos(schedule.lambda_t) * Matrix::Identity(4, 4) - i * std::sin(schedule.lambda_t) * xx);
  return drive * coupling;
}

Matrix annihilation(int fock_cutoff) {
  Matrix a = Matrix::Zero(fock_cutoff + 1, fock_cutoff + 1);
  for (int n = 1; n <= fock_cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix full_hamiltonian(const CavityParams& params) {
  // Decoupled limits (g = 0 or Omega = 0) are allowed here; only the
  // truncation is checked.
  if (params.fock_cutoff < 2) throw Error("fock_cutoff must be at least 2");
  const int nf = params.fock_cutoff + 1;
  const Matrix a = annihilation(params.fock_cutoff);
  const Matrix ad = a.adjoint();
  const Matrix i2 = gates::identity(2);
  const Matrix iff = gates::identity(nf);
  const Matrix sm = lowering();
  const Matrix sp = sm.adjoint();

  const int dim = 4 * nf;
  Matrix h = Matrix::Zero(dim, dim);
  h += -params.detuning_sign * params.delta * gates::kron(ad * a, gates::identity(4));
  const Matrix atom_lowering[2] = {gates::kron(sm, i2), gates::kron(i2, sm)};
  const Matrix atom_raising[2] = {gates::kron(sp, i2), gates::kron(i2, sp)};
  for (int j = 0; j < 2; ++j) {
    h += params.g * (gates::kron(ad, atom_lowering[j]) + gates::kron(a, atom_raising[j]));
    h += params.omega_rabi * gates::kron(iff, atom_raising[j] + atom_lowering[j]);
  }
  return h;
}

FullPropagator::FullPropagator(const CavityParams& params) : params_(params) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(full_hamiltonian(params_));
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition of H_rot failed");
  energies_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Matrix FullPropagator::propagator(double t) const {
  Vector phases(energies_.size());
  for (Eigen::Index k = 0; k < energies_.size(); ++k) phases[k] = std::polar(1.0, -energies_[k] * t);
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

FullEvolution FullPropagator::evolve(const PureState& initial, double t) const {
  const int nf = params_.fock_cutoff + 1;
  if (!initial.has_site(kCavityLabel) || initial.dim_of(kCavityLabel) != nf) {
    throw LabelError("full evolution needs a cavity site of dimension F+1", kCavityLabel);
  }
  if (initial.site_count() != 3) throw Error("full evolution acts on exactly two atoms and the cavity");
  for (SiteLabel l : initial.labels()) {
    if (l != kCavityLabel && initial.dim_of(l) != 2) throw LabelError("atom sites must be two-level", l);
  }
  // Cavity label sorts first, so the register layout is (cavity, atom, atom).
  Vector out = propagator(t) * initial.amplitudes();
  FullEvolution result{PureState(initial.labels(), initial.dims(), out), 0.0, false};
  result.leak = out.segment(4 * (nf - 1), 4).squaredNorm();
  result.leak_flagged = result.leak > kLeakThreshold;
  return result;
}

FullEvolution full_evolution(const CavityParams& params, double t, const PureState& initial) {
  return FullPropagator(params).evolve(initial, t);
}

PureState with_cavity_vacuum(const PureState& atoms, int fock_cutoff) {
  return tensor({PureState::fock(kCavityLabel, fock_cutoff, 0), atoms});
}

bool ValidationReport::leak_warning() const {
  for (const auto& p : ladder) {
    if (p.leak > kLeakThreshold) return true;
  }
  return false;
}

std::vector<LadderPoint> default_ladder() { return {{5.0, 5.0}, {10.0, 10.0}, {20.0, 20.0}}; }

ValidationReport validate_effective(const std::vector<LadderPoint>& ladder, int fock_cutoff, int samples,
                                    std::uint64_t seed, unsigned threads, int detuning_sign) {
  if (ladder.empty()) throw Error("validate_effective: ladder is empty");
  if (samples < 10) throw Error("validate_effective: at least 10 samples required");

  struct PointModel {
    CavityParams params;
    double t = 0.0;
    Matrix full;
    Matrix effective;
  };
  std::vector<PointModel> models;
  for (const auto& point : ladder) {
    PointModel m;
    m.params = CavityParams::from_ratios(point.delta_over_g, point.omega_over_delta, fock_cutoff);
    m.params.detuning_sign = detuning_sign;
    m.t = pi / (4.0 * m.params.lambda());
    m.full = FullPropagator(m.params).propagator(m.t);
    m.effective = effective_unitary(InteractionSchedule::bind(m.params, m.t));
    models.push_back(std::move(m));
  }

  const SplitRng root(seed);
  const std::size_t per_point = static_cast<std::size_t>(samples);
  std::vector<double> fidelities(models.size() * per_point);
  std::vector<double> leaks(models.size() * per_point);
  const std::vector<SiteLabel> atom_labels = {1, 2};

  detail::parallel_for(fidelities.size(), threads, [&](std::size_t job) {
    const std::size_t p = job / per_point;
    const std::size_t s = job % per_point;
    SplitRng rng = root.split("validate", p).split("sample", s);
    const Vector v = haar_vector(4, rng);
    const PureState atoms({1, 2}, {2, 2}, v);
    const PureState initial = with_cavity_vacuum(atoms, fock_cutoff);

    const Vector evolved = models[p].full * initial.amplitudes();
    const PureState full_state(initial.labels(), initial.dims(), evolved);
    const DensityMatrix rho = partial_trace(full_state, atom_labels);
    const PureState eff({1, 2}, {2, 2}, models[p].effective * v);
    fidelities[job] = rho.overlap(eff);
    leaks[job] = evolved.segment(4 * fock_cutoff, 4).squaredNorm();
  });

  ValidationReport report;
  report.samples = samples;
  report.seed = seed;
  for (std::size_t p = 0; p < models.size(); ++p) {
    double sum = 0.0;
    double leak = 0.0;
    for (std::size_t s = 0; s < per_point; ++s) {
      sum += fidelities[p * per_point + s];
      leak = std::max(leak, leaks[p * per_point + s]);
    }
    ValidationPoint vp;
    vp.delta_over_g = ladder[p].delta_over_g;
    vp.omega_over_delta = ladder[p].omega_over_delta;
    vp.fock_cutoff = fock_cutoff;
    vp.deviation = std::clamp(1.0 - sum / static_cast<double>(per_point), 0.0, 1.0);
    vp.leak = leak;
    report.ladder.push_back(vp);
  }
  return report;
}

}  // namespace qss::cavity
