#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace salsa {

// SplitMix64 finalizer; full avalanche on 64-bit inputs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded per-row hashes. The row index is the top log2(width) bits of the
// row hash and the sign is its lowest bit, so coarse indices used by the
// underlying sketch (index >> level) are prefixes of the fine ones.
class HashFamily {
 public:
  HashFamily(std::uint64_t seed, unsigned rows, std::size_t width)
      : seed_(seed), width_(width), index_shift_(64 - std::countr_zero(width)) {
    row_seeds_.reserve(rows);
    for (unsigned i = 0; i < rows; ++i) {
      row_seeds_.push_back(mix64(seed ^ mix64(0x5a15a000ULL + i)));
    }
  }

  std::uint64_t raw(unsigned row, std::uint64_t item) const noexcept {
    const std::uint64_t s = row_seeds_[row];
    return mix64(mix64(item ^ s) ^ std::rotl(s, 32));
  }

  std::size_t index(unsigned row, std::uint64_t item) const noexcept {
    return index_of(raw(row, item));
  }
  int sign(unsigned row, std::uint64_t item) const noexcept { return sign_of(raw(row, item)); }

  std::size_t index_of(std::uint64_t h) const noexcept {
    return index_shift_ >= 64 ? 0 : static_cast<std::size_t>(h >> index_shift_);
  }
  static int sign_of(std::uint64_t h) noexcept { return (h & 1U) != 0 ? 1 : -1; }

  std::uint64_t seed() const noexcept { return seed_; }
  unsigned rows() const noexcept { return static_cast<unsigned>(row_seeds_.size()); }
  std::size_t width() const noexcept { return width_; }

 private:
  std::uint64_t seed_;
  std::size_t width_;
  unsigned index_shift_;
  std::vector<std::uint64_t> row_seeds_;
};

}  // namespace salsa
