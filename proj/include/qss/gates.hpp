#pragma once

#include "qss/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace qss::gates {

// Single-atom matrices in the (|g>, |e>) index order.

Matrix identity(int dim);
Matrix sigma_x();

/// The protocol's sigma_z: |e> -> |e>, |g> -> -|g>.
Matrix sigma_z();

/// |e><e| + e^{i theta}|g><g|.
Matrix phase_on_ground(double theta);

/// Columns are |X+>, |X-> expressed in the computational basis.
Matrix x_basis();

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qss::gates

namespace qss {

/// Single-atom correction the receiver applies. Two-letter labels are matrix
/// products (XZ = X * Z, so Z acts first). S is a quarter phase on |g>.
enum class Correction { I, Z, X, XZ, S, Sdg, XS, XSdg };

/// Search order used when building correction tables.
inline constexpr std::array<Correction, 8> kCorrectionOrder = {
    Correction::I, Correction::Z, Correction::X, Correction::XZ,
    Correction::S, Correction::Sdg, Correction::XS, Correction::XSdg};

std::string to_string(Correction c);
std::optional<Correction> parse_correction(std::string_view label);
Matrix correction_matrix(Correction c);
bool is_pauli(Correction c);

}  // namespace qss
