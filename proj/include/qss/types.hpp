#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qss {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Site identifier inside a register. Atoms use their 1-based protocol
/// labels; the cavity mode uses kCavityLabel.
using SiteLabel = int;

inline constexpr SiteLabel kCavityLabel = 0;

namespace tol {
inline constexpr double kCheck = 1e-10;      // runtime invariant checks
inline constexpr double kIdentity = 1e-12;   // algebraic identities
inline constexpr double kRecovery = 1e-9;    // "exact recovery" threshold
inline constexpr double kZeroProbability = 1e-14;
}  // namespace tol

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A site label was duplicated, missing, or otherwise invalid.
class LabelError : public Error {
 public:
  LabelError(const std::string& what, SiteLabel label)
      : Error(what + " (label " + std::to_string(label) + ")"), label_(label) {}
  SiteLabel label() const noexcept { return label_; }

 private:
  SiteLabel label_;
};

/// A matrix passed as a unitary failed the unitarity check.
class NonUnitaryError : public Error {
 public:
  explicit NonUnitaryError(double deviation)
      : Error("matrix is not unitary: ||u^dag u - I|| = " + std::to_string(deviation)),
        deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

}  // namespace qss
