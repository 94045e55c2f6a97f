#pragma once

// Computational-basis encoding shared by every module.
//
// |g> is index 0 and |e> is index 1. Multi-site registers are big-endian over
// ascending labels: the site with the smallest label varies slowest.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace qss::basis {

inline constexpr int kGround = 0;
inline constexpr int kExcited = 1;

inline constexpr char kGroundChar = 'g';
inline constexpr char kExcitedChar = 'e';
inline constexpr char kPlusChar = '+';
inline constexpr char kMinusChar = '-';

/// "eg.." -> index, first character most significant.
std::uint64_t encode(std::string_view levels);

/// index -> "eg.." of the given width.
std::string decode(std::uint64_t index, std::size_t width);

}  // namespace qss::basis
