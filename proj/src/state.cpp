#include "qss/state.hpp"

#include "qss/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace qss {

namespace {

std::size_t product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

std::vector<std::size_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * static_cast<std::size_t>(dims[i]);
  return strides;
}

void check_labels_unique(const std::vector<SiteLabel>& labels) {
  std::set<SiteLabel> seen;
  for (SiteLabel l : labels) {
    if (!seen.insert(l).second) throw LabelError("duplicate site label", l);
  }
}

// Bra components for one measured two-level site.
std::array<Complex, 2> bra_for(MeasurementBasis basis, char symbol) {
  const double r = 1.0 / std::sqrt(2.0);
  if (basis == MeasurementBasis::Z) {
    if (symbol == basis::kGroundChar) return {Complex{1.0}, Complex{0.0}};
    if (symbol == basis::kExcitedChar) return {Complex{0.0}, Complex{1.0}};
  } else {
    // |X+-> = (|e> +- |g>) / sqrt 2
    if (symbol == basis::kPlusChar) return {Complex{r}, Complex{r}};
    if (symbol == basis::kMinusChar) return {Complex{-r}, Complex{r}};
  }
  throw Error(std::string("outcome symbol '") + symbol + "' is not valid in the " + to_string(basis) + " basis");
}

// Contracts one site with <bra|, dropping it from the register. Unnormalized.
PureState contract_site(const PureState& state, std::size_t pos, const std::array<Complex, 2>& bra) {
  const auto& dims = state.dims();
  std::size_t inner = 1;
  for (std::size_t i = pos + 1; i < dims.size(); ++i) inner *= static_cast<std::size_t>(dims[i]);
  const std::size_t outer = state.dimension() / (2 * inner);

  Vector out(static_cast<Eigen::Index>(outer * inner));
  const Vector& amps = state.amplitudes();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * 2 * inner + i;
      out[static_cast<Eigen::Index>(o * inner + i)] =
          std::conj(bra[0]) * amps[static_cast<Eigen::Index>(base)] +
          std::conj(bra[1]) * amps[static_cast<Eigen::Index>(base + inner)];
    }
  }
  auto labels = state.labels();
  auto new_dims = state.dims();
  labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(pos));
  new_dims.erase(new_dims.begin() + static_cast<std::ptrdiff_t>(pos));
  return PureState(std::move(labels), std::move(new_dims), std::move(out));
}

}  // namespace

std::string to_string(MeasurementBasis basis) { return basis == MeasurementBasis::Z ? "Z" : "X"; }

// ---------------------------------------------------------------- PureState

PureState::PureState() : amplitudes_(Vector::Ones(1)) {}

PureState::PureState(std::vector<SiteLabel> labels, std::vector<int> dims, Vector amplitudes)
    : labels_(std::move(labels)), dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
  if (labels_.size() != dims_.size()) throw Error("labels and dims differ in length");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) throw LabelError("site dimension must be positive", labels_[i]);
  }
  check_labels_unique(labels_);
  if (static_cast<std::size_t>(amplitudes_.size()) != product(dims_)) {
    throw Error("amplitude count " + std::to_string(amplitudes_.size()) + " does not match product of dims " +
                std::to_string(product(dims_)));
  }
  if (!std::is_sorted(labels_.begin(), labels_.end())) {
    // Re-express in ascending-label order.
    PureState sorted = tensor({*this});
    *this = std::move(sorted);
  }
}

PureState PureState::atom(SiteLabel label, Complex amp_e, Complex amp_g) {
  Vector v(2);
  v[basis::kGround] = amp_g;
  v[basis::kExcited] = amp_e;
  return PureState({label}, {2}, std::move(v));
}

PureState PureState::basis_state(std::vector<SiteLabel> labels, const std::string& levels) {
  if (labels.size() != levels.size()) throw Error("basis_state: one level per label required");
  std::vector<PureState> parts;
  parts.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool excited = levels[i] == basis::kExcitedChar;
    if (!excited && levels[i] != basis::kGroundChar) throw Error("basis_state: levels must be 'g' or 'e'");
    parts.push_back(atom(labels[i], excited ? 1.0 : 0.0, excited ? 0.0 : 1.0));
  }
  return tensor(parts);
}

PureState PureState::fock(SiteLabel label, int cutoff, int photons) {
  if (photons < 0 || photons > cutoff) throw Error("photon number outside the truncated space");
  Vector v = Vector::Zero(cutoff + 1);
  v[photons] = 1.0;
  return PureState({label}, {cutoff + 1}, std::move(v));
}

bool PureState::has_site(SiteLabel label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t PureState::position(SiteLabel label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw LabelError("unknown site label", label);
  return static_cast<std::size_t>(it - labels_.begin());
}

int PureState::dim_of(SiteLabel label) const { return dims_[position(label)]; }

double PureState::norm() const { return amplitudes_.norm(); }

void PureState::normalize() {
  const double n = norm();
  if (n == 0.0) throw Error("cannot normalize a zero vector");
  amplitudes_ /= n;
}

Complex PureState::amplitude(const std::string& levels) const {
  if (levels.size() != labels_.size()) throw Error("amplitude: one level per site required");
  for (int d : dims_) {
    if (d != 2) throw Error("amplitude by level string needs an all-atom register");
  }
  return amplitudes_[static_cast<Eigen::Index>(basis::encode(levels))];
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(std::vector<SiteLabel> labels, std::vector<int> dims, Matrix entries)
    : labels_(std::move(labels)), dims_(std::move(dims)), entries_(std::move(entries)) {
  check_labels_unique(labels_);
  const auto n = static_cast<Eigen::Index>(product(dims_));
  if (entries_.rows() != n || entries_.cols() != n) throw Error("density matrix size does not match dims");
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  const Vector& v = state.amplitudes();
  return DensityMatrix(state.labels(), state.dims(), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(SiteLabel label) {
  return DensityMatrix({label}, {2}, Matrix::Identity(2, 2) * 0.5);
}

double DensityMatrix::trace() const { return entries_.trace().real(); }

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double DensityMatrix::overlap(const PureState& psi) const {
  if (psi.labels() != labels_ || psi.dims() != dims_) throw Error("overlap: register mismatch");
  const Vector& v = psi.amplitudes();
  return (v.adjoint() * entries_ * v)(0, 0).real();
}

void DensityMatrix::check_physical() const {
  const double herm = (entries_ - entries_.adjoint()).norm();
  if (herm > tol::kCheck) throw Error("density matrix is not Hermitian: " + std::to_string(herm));
  if (std::abs(trace() - 1.0) > tol::kCheck) throw Error("density matrix trace is " + std::to_string(trace()));
  const double min_eig = eigenvalues().minCoeff();
  if (min_eig < -tol::kCheck) throw Error("density matrix has eigenvalue " + std::to_string(min_eig));
}

// --------------------------------------------------------------- operations

PureState tensor(std::initializer_list<PureState> states) {
  return tensor(std::span<const PureState>(states.begin(), states.size()));
}

PureState tensor(std::span<const PureState> states) {
  std::vector<SiteLabel> labels;
  std::vector<int> dims;
  Vector amps = Vector::Ones(1);
  for (const PureState& s : states) {
    for (SiteLabel l : s.labels()) {
      if (std::find(labels.begin(), labels.end(), l) != labels.end()) {
        throw LabelError("tensor: label appears in more than one factor", l);
      }
    }
    labels.insert(labels.end(), s.labels().begin(), s.labels().end());
    dims.insert(dims.end(), s.dims().begin(), s.dims().end());
    const Vector& b = s.amplitudes();
    Vector next(amps.size() * b.size());
    for (Eigen::Index i = 0; i < amps.size(); ++i) next.segment(i * b.size(), b.size()) = amps[i] * b;
    amps = std::move(next);
  }

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

  std::vector<SiteLabel> sorted_labels;
  std::vector<int> sorted_dims;
  for (std::size_t i : order) {
    sorted_labels.push_back(labels[i]);
    sorted_dims.push_back(dims[i]);
  }
  if (sorted_labels == labels) {
    return PureState(std::move(sorted_labels), std::move(sorted_dims), std::move(amps));
  }

  const auto src_strides = strides_of(dims);
  const auto dst_strides = strides_of(sorted_dims);
  Vector out(amps.size());
  for (std::size_t dst = 0; dst < static_cast<std::size_t>(amps.size()); ++dst) {
    std::size_t src = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t digit = (dst / dst_strides[k]) % static_cast<std::size_t>(sorted_dims[k]);
      src += digit * src_strides[order[k]];
    }
    out[static_cast<Eigen::Index>(dst)] = amps[static_cast<Eigen::Index>(src)];
  }
  return PureState(std::move(sorted_labels), std::move(sorted_dims), std::move(out));
}

double unitarity_deviation(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

PureState apply_unitary(const PureState& state, const Matrix& u, std::initializer_list<SiteLabel> targets) {
  return apply_unitary(state, u, std::span<const SiteLabel>(targets.begin(), targets.size()));
}

PureState apply_unitary(const PureState& state, const Matrix& u, std::span<const SiteLabel> targets) {
  std::vector<std::size_t> pos;
  std::size_t sub_dim = 1;
  for (SiteLabel t : targets) {
    const std::size_t p = state.position(t);
    if (std::find(pos.begin(), pos.end(), p) != pos.end()) throw LabelError("apply_unitary: repeated target", t);
    pos.push_back(p);
    sub_dim *= static_cast<std::size_t>(state.dims()[p]);
  }
  if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != sub_dim) {
    throw Error("apply_unitary: matrix is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                " but targets span dimension " + std::to_string(sub_dim));
  }
  const double dev = unitarity_deviation(u);
  if (dev > tol::kCheck) throw NonUnitaryError(dev);

  const auto strides = strides_of(state.dims());
  // Offset of each sub-index of u within the full register.
  std::vector<std::size_t> offsets(sub_dim, 0);
  for (std::size_t s = 0; s < sub_dim; ++s) {
    std::size_t rem = s;
    for (std::size_t k = pos.size(); k-- > 0;) {
      const auto d = static_cast<std::size_t>(state.dims()[pos[k]]);
      offsets[s] += (rem % d) * strides[pos[k]];
      rem /= d;
    }
  }

  PureState out = state;
  Vector& amps = out.amplitudes();
  Vector gathered(static_cast<Eigen::Index>(sub_dim));
  for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
    bool base = true;
    for (std::size_t p : pos) {
      if ((idx / strides[p]) % static_cast<std::size_t>(state.dims()[p]) != 0) {
        base = false;
        break;
      }
    }
    if (!base) continue;
    for (std::size_t s = 0; s < sub_dim; ++s) gathered[static_cast<Eigen::Index>(s)] = amps[static_cast<Eigen::Index>(idx + offsets[s])];
    const Vector result = u * gathered;
    for (std::size_t s = 0; s < sub_dim; ++s) amps[static_cast<Eigen::Index>(idx + offsets[s])] = result[static_cast<Eigen::Index>(s)];
  }
  return out;
}

Projection project(const PureState& state, std::span<const SiteLabel> sites, MeasurementBasis basis,
                   const std::string& outcome) {
  if (outcome.size() != sites.size()) {
    throw Error("project: outcome has " + std::to_string(outcome.size()) + " symbols for " +
                std::to_string(sites.size()) + " sites");
  }
  std::set<SiteLabel> seen;
  for (SiteLabel s : sites) {
    if (!seen.insert(s).second) throw LabelError("project: repeated site", s);
    if (state.dim_of(s) != 2) throw LabelError("project: only two-level sites can be measured", s);
  }

  PureState current = state;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    current = contract_site(current, current.position(sites[i]), bra_for(basis, outcome[i]));
  }
  Projection result;
  result.probability = current.amplitudes().squaredNorm();
  if (result.probability < tol::kZeroProbability) {
    result.probability = 0.0;
    return result;
  }
  current.amplitudes() /= std::sqrt(result.probability);
  result.collapsed = std::move(current);
  return result;
}

std::vector<std::string> all_outcomes(std::size_t site_count, MeasurementBasis basis) {
  std::vector<std::string> out;
  const std::size_t n = std::size_t{1} << site_count;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string s = basis::decode(i, site_count);
    if (basis == MeasurementBasis::X) {
      for (char& c : s) c = (c == basis::kGroundChar) ? basis::kPlusChar : basis::kMinusChar;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<MeasurementRecord, PureState> sample_measurement(const PureState& state,
                                                           std::span<const SiteLabel> sites,
                                                           MeasurementBasis basis, SplitRng& rng) {
  std::vector<Projection> branches;
  std::vector<std::string> outcomes = all_outcomes(sites.size(), basis);
  double total = 0.0;
  for (const auto& o : outcomes) {
    branches.push_back(project(state, sites, basis, o));
    total += branches.back().probability;
  }
  const double draw = rng.uniform() * total;
  double acc = 0.0;
  std::size_t chosen = branches.size();
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (!branches[i].possible()) continue;
    chosen = i;  // last possible outcome absorbs rounding
    acc += branches[i].probability;
    if (draw < acc) break;
  }
  if (chosen == branches.size()) throw Error("sample_measurement: state has zero norm");

  MeasurementRecord record{std::vector<SiteLabel>(sites.begin(), sites.end()), basis, outcomes[chosen],
                           branches[chosen].probability};
  return {std::move(record), std::move(*branches[chosen].collapsed)};
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.labels() != b.labels() || a.dims() != b.dims()) throw Error("inner product: register mismatch");
  return a.amplitudes().dot(b.amplitudes());  // conjugates a
}

double fidelity_up_to_phase(const PureState& a, const PureState& b) {
  const double f = std::norm(inner_product(a, b));
  return std::clamp(f, 0.0, 1.0);
}

namespace {

struct TraceSplit {
  std::vector<SiteLabel> keep_labels;
  std::vector<int> keep_dims;
  std::vector<std::size_t> kept_index;    // full index -> kept subsystem index
  std::vector<std::size_t> traced_index;  // full index -> traced subsystem index
  std::size_t keep_dim = 1;
  std::size_t traced_dim = 1;
};

TraceSplit split_register(const std::vector<SiteLabel>& labels, const std::vector<int>& dims,
                          std::span<const SiteLabel> keep) {
  if (keep.empty()) throw Error("partial_trace: keep set is empty");
  std::vector<bool> kept(labels.size(), false);
  for (SiteLabel k : keep) {
    auto it = std::find(labels.begin(), labels.end(), k);
    if (it == labels.end()) throw LabelError("partial_trace: label not in register", k);
    const auto p = static_cast<std::size_t>(it - labels.begin());
    if (kept[p]) throw LabelError("partial_trace: repeated label", k);
    kept[p] = true;
  }
  TraceSplit split;
  std::vector<int> traced_dims;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (kept[i]) {
      split.keep_labels.push_back(labels[i]);
      split.keep_dims.push_back(dims[i]);
      split.keep_dim *= static_cast<std::size_t>(dims[i]);
    } else {
      traced_dims.push_back(dims[i]);
      split.traced_dim *= static_cast<std::size_t>(dims[i]);
    }
  }
  const std::size_t total = split.keep_dim * split.traced_dim;
  const auto strides = strides_of(dims);
  split.kept_index.assign(total, 0);
  split.traced_index.assign(total, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t k = 0;
    std::size_t t = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto d = static_cast<std::size_t>(dims[i]);
      const std::size_t digit = (idx / strides[i]) % d;
      if (kept[i]) {
        k = k * d + digit;
      } else {
        t = t * d + digit;
      }
    }
    split.kept_index[idx] = k;
    split.traced_index[idx] = t;
  }
  return split;
}

}  // namespace

DensityMatrix partial_trace(const PureState& state, std::span<const SiteLabel> keep) {
  const TraceSplit split = split_register(state.labels(), state.dims(), keep);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(split.keep_dim), static_cast<Eigen::Index>(split.traced_dim));
  for (std::size_t idx = 0; idx < state.dimension(); ++idx) {
    m(static_cast<Eigen::Index>(split.kept_index[idx]), static_cast<Eigen::Index>(split.traced_index[idx])) =
        state.amplitudes()[static_cast<Eigen::Index>(idx)];
  }
  return DensityMatrix(split.keep_labels, split.keep_dims, m * m.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const SiteLabel> keep) {
  const TraceSplit split = split_register(rho.labels(), rho.dims(), keep);
  // Group full indices by traced index.
  std::vector<std::vector<std::size_t>> groups(split.traced_dim);
  for (std::size_t idx = 0; idx < split.kept_index.size(); ++idx) groups[split.traced_index[idx]].push_back(idx);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(split.keep_dim), static_cast<Eigen::Index>(split.keep_dim));
  for (const auto& group : groups) {
    for (std::size_t i : group) {
      for (std::size_t j : group) {
        out(static_cast<Eigen::Index>(split.kept_index[i]), static_cast<Eigen::Index>(split.kept_index[j])) +=
            rho.entries()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return DensityMatrix(split.keep_labels, split.keep_dims, std::move(out));
}

Vector haar_vector(int dimension, SplitRng& rng) {
  Vector v(dimension);
  for (int i = 0; i < dimension; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v[i] = Complex(re, im);
  }
  return v / v.norm();
}

}  // namespace qss
