#include "qss/rng.hpp"

namespace qss {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t hash_tag(std::string_view tag) noexcept {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::seed_seq seed_from(std::uint64_t key) {
  return std::seed_seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed) : SplitRng(FromKey{}, splitmix64(seed)) {}

SplitRng::SplitRng(FromKey, std::uint64_t key) : key_(key) {
  auto seq = seed_from(key_);
  engine_.seed(seq);
}

SplitRng SplitRng::split(std::string_view tag, std::uint64_t index) const {
  std::uint64_t k = splitmix64(key_ ^ hash_tag(tag));
  k = splitmix64(k ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return SplitRng(FromKey{}, k);
}

double SplitRng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double SplitRng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

bool SplitRng::coin() { return uniform() < 0.5; }

}  // namespace qss
