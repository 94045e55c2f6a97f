#include "qss/basis.hpp"

#include "qss/types.hpp"

namespace qss::basis {

std::uint64_t encode(std::string_view levels) {
  if (levels.size() > 63) throw Error("bit string too long: " + std::to_string(levels.size()));
  std::uint64_t index = 0;
  for (char c : levels) {
    index <<= 1;
    if (c == kExcitedChar) {
      index |= 1;
    } else if (c != kGroundChar) {
      throw Error(std::string("invalid level character '") + c + "'");
    }
  }
  return index;
}

std::string decode(std::uint64_t index, std::size_t width) {
  std::string out(width, kGroundChar);
  for (std::size_t i = 0; i < width; ++i) {
    if ((index >> (width - 1 - i)) & 1U) out[i] = kExcitedChar;
  }
  return out;
}

}  // namespace qss::basis
