#include "qss/gates.hpp"

#include "qss/basis.hpp"

#include <cmath>
#include <numbers>

namespace qss::gates {

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix sigma_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Matrix sigma_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(basis::kExcited, basis::kExcited) = 1.0;
  m(basis::kGround, basis::kGround) = -1.0;
  return m;
}

Matrix phase_on_ground(double theta) {
  Matrix m = Matrix::Zero(2, 2);
  m(basis::kExcited, basis::kExcited) = 1.0;
  m(basis::kGround, basis::kGround) = std::polar(1.0, theta);
  return m;
}

Matrix x_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  // column 0: |X+> = (|e> + |g>)/sqrt2, column 1: |X-> = (|e> - |g>)/sqrt2
  m(basis::kGround, 0) = r;
  m(basis::kExcited, 0) = r;
  m(basis::kGround, 1) = -r;
  m(basis::kExcited, 1) = r;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace qss::gates

namespace qss {

std::string to_string(Correction c) {
  switch (c) {
    case Correction::I: return "I";
    case Correction::Z: return "Z";
    case Correction::X: return "X";
    case Correction::XZ: return "XZ";
    case Correction::S: return "S";
    case Correction::Sdg: return "Sdg";
    case Correction::XS: return "XS";
    case Correction::XSdg: return "XSdg";
  }
  return "?";
}

std::optional<Correction> parse_correction(std::string_view label) {
  for (Correction c : kCorrectionOrder) {
    if (to_string(c) == label) return c;
  }
  return std::nullopt;
}

Matrix correction_matrix(Correction c) {
  using std::numbers::pi;
  switch (c) {
    case Correction::I: return gates::identity(2);
    case Correction::Z: return gates::sigma_z();
    case Correction::X: return gates::sigma_x();
    case Correction::XZ: return gates::sigma_x() * gates::sigma_z();
    case Correction::S: return gates::phase_on_ground(pi / 2);
    case Correction::Sdg: return gates::phase_on_ground(-pi / 2);
    case Correction::XS: return gates::sigma_x() * gates::phase_on_ground(pi / 2);
    case Correction::XSdg: return gates::sigma_x() * gates::phase_on_ground(-pi / 2);
  }
  throw Error("unknown correction");
}

bool is_pauli(Correction c) {
  return c == Correction::I || c == Correction::Z || c == Correction::X || c == Correction::XZ;
}

}  // namespace qss
