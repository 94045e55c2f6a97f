#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qss {

/// Seeded generator that derives independent child streams by name and index.
///
/// A child depends only on the parent key and the (tag, index) pair, so trial
/// i draws the same numbers whatever the trial count or thread schedule.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed);

  SplitRng split(std::string_view tag, std::uint64_t index = 0) const;

  std::uint64_t key() const noexcept { return key_; }
  std::mt19937_64& engine() noexcept { return engine_; }

  double uniform();  // [0, 1)
  double normal();   // standard normal
  bool coin();

 private:
  struct FromKey {};
  SplitRng(FromKey, std::uint64_t key);

  std::uint64_t key_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace qss
