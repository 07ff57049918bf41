#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace salsa {

// How the value of a freshly merged counter is formed from its two halves.
// Max is only meaningful for non-negative (cash register) counters.
enum class MergePolicy : std::uint8_t { Sum = 0, Max = 1 };

enum class CounterEncoding : std::uint8_t { Unsigned = 0, SignMagnitude = 1 };

enum class DownsampleMode : std::uint8_t { Deterministic = 0, Probabilistic = 1 };

// One logical counter: 2^level consecutive slots starting at an offset that
// is a multiple of 2^level.
struct CounterRef {
  std::size_t offset = 0;
  unsigned level = 0;

  std::size_t span() const noexcept { return std::size_t{1} << level; }
  bool contains(std::size_t j) const noexcept { return j >= offset && j - offset < span(); }
  bool operator==(const CounterRef&) const = default;
};

/// A row of SALSA counters.
///
/// `width` base slots of `slot_bits` bits each, plus one merge bit per slot.
/// An overflowing counter doubles by absorbing its aligned sibling block:
/// group index i merges with i ^ 1, so even groups grow rightwards and odd
/// groups leftwards. A merged block of 2^L slots starting at b is recorded by
/// setting merge bit b + 2^(L-1) - 1, and every sub-block of a merged block is
/// marked merged as well, so a fully merged block has all of its merge bits
/// set except the last one.
///
/// Values are stored slot-little-endian: the lowest slot of a counter holds
/// its least significant bits. Since slot_bits and the span are powers of two,
/// no counter straddles a 64-bit storage word.
class SlotArray {
 public:
  SlotArray(unsigned slot_bits, std::size_t width,
            CounterEncoding encoding = CounterEncoding::Unsigned);

  unsigned slot_bits() const noexcept { return slot_bits_; }
  std::size_t width() const noexcept { return width_; }
  unsigned max_level() const noexcept { return max_level_; }
  CounterEncoding encoding() const noexcept { return encoding_; }

  // Sticky: set once any counter was clamped at the top level.
  bool saturated() const noexcept { return saturated_; }
  // Level of the largest live counter.
  unsigned peak_level() const noexcept { return peak_level_; }

  unsigned counter_bits(CounterRef ref) const noexcept { return slot_bits_ << ref.level; }
  // Largest storable value (unsigned) or magnitude (sign-magnitude).
  std::uint64_t capacity(CounterRef ref) const noexcept {
    const unsigned bits = counter_bits(ref) - (is_signed() ? 1U : 0U);
    return bits == 0 ? 0 : ~std::uint64_t{0} >> (64 - bits);
  }

  static std::size_t merge_bit_index(std::size_t block_start, unsigned level) noexcept {
    return block_start + (std::size_t{1} << (level - 1)) - 1;
  }
  bool merge_bit(std::size_t j) const noexcept { return (merge_bits_[j >> 6] >> (j & 63)) & 1U; }

  CounterRef locate(std::size_t j) const noexcept {
    // Merges are downward closed, so the level is the count of set chain bits.
    const unsigned level = bit_count(merge_bits_[j >> 6] & chain_masks_[j & 63]);
    return {(j >> level) << level, level};
  }

  std::uint64_t read_unsigned(CounterRef ref) const noexcept { return load_raw(ref); }
  void write_unsigned(CounterRef ref, std::uint64_t value);
  CounterRef merge_up(CounterRef ref, MergePolicy policy);
  // Adds `value` to the counter holding slot j, merging first while the sum
  // would not fit.
  CounterRef add_unsigned(std::size_t j, std::uint64_t value, MergePolicy policy) {
    const CounterRef ref = locate(j);
    const std::size_t bit = ref.offset * slot_bits_;
    const std::uint64_t cap = capacity(ref);
    std::uint64_t& word = slots_[bit >> 6];
    if (value <= cap - ((word >> (bit & 63)) & cap)) {
      word += value << (bit & 63);
      return ref;
    }
    return grow_and_add(ref, value, policy);
  }
  // Sets the counter holding slot j to max(current, target), growing as needed.
  CounterRef raise_to(std::size_t j, std::uint64_t target, MergePolicy policy);

  std::int64_t read_signed(CounterRef ref) const noexcept;
  void write_signed(CounterRef ref, std::int64_t value);
  CounterRef add_signed(std::size_t j, std::int64_t value, MergePolicy policy = MergePolicy::Sum);

  // Replaces every counter C by floor(C/2) or Binomial(C, 1/2). The merge
  // layout is untouched.
  void scale_down_all(DownsampleMode mode, std::uint64_t rng_seed);
  void scale_down_all(DownsampleMode mode, std::mt19937_64& rng);

  // Undoes the last merge of `ref` (one level), copying its value into both
  // halves. Only valid for max-merged counters.
  std::pair<CounterRef, CounterRef> split(CounterRef ref, MergePolicy policy);

  // Grows the counter holding slot j until it is at least `level` deep.
  CounterRef merge_to_level(std::size_t j, unsigned level, MergePolicy policy);

  // Combined value of all live counters inside an aligned block.
  std::uint64_t resolve_unsigned(std::size_t block_start, unsigned level,
                                 MergePolicy policy) const noexcept;
  std::int64_t resolve_signed(std::size_t block_start, unsigned level) const noexcept;

  template <typename F>
  void for_each_counter(F&& visit) const {
    for (std::size_t j = 0; j < width_;) {
      const CounterRef ref = locate(j);
      visit(ref);
      j += ref.span();
    }
  }

  std::size_t memory_bits() const noexcept { return width_ * slot_bits_ + width_; }

  std::vector<std::uint8_t> snapshot() const;
  // Parses one snapshot from the front of `bytes`; `consumed` receives its length.
  static SlotArray from_snapshot(std::span<const std::uint8_t> bytes, CounterEncoding encoding,
                                 std::size_t* consumed = nullptr);

  // Empty when every structural invariant holds, otherwise a description of
  // the first violation found.
  std::optional<std::string> find_violation() const;

  bool operator==(const SlotArray& other) const noexcept;

 private:
  // Inline SWAR popcount; std::popcount becomes a libgcc call without -mpopcnt.
  static unsigned bit_count(std::uint64_t x) noexcept {
    x -= (x >> 1) & 0x5555555555555555ULL;
    x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
    x = (x + (x >> 4)) & 0x0f0f0f0f0f0f0f0fULL;
    return static_cast<unsigned>((x * 0x0101010101010101ULL) >> 56);
  }
  CounterRef grow_and_add(CounterRef ref, std::uint64_t value, MergePolicy policy);
  std::uint64_t load_raw(CounterRef ref) const noexcept;
  void store_raw(CounterRef ref, std::uint64_t raw) noexcept;
  void set_merge_bit(std::size_t j) noexcept { merge_bits_[j >> 6] |= std::uint64_t{1} << (j & 63); }
  void clear_merge_bit(std::size_t j) noexcept { merge_bits_[j >> 6] &= ~(std::uint64_t{1} << (j & 63)); }
  void recompute_peak_level() noexcept;
  bool is_signed() const noexcept { return encoding_ == CounterEncoding::SignMagnitude; }

  unsigned slot_bits_;
  std::size_t width_;
  unsigned max_level_;
  // Merge bits on the chain above each position of a bitmap word.
  const std::uint64_t* chain_masks_;
  CounterEncoding encoding_;
  bool saturated_ = false;
  unsigned peak_level_ = 0;
  std::vector<std::uint64_t> slots_;
  std::vector<std::uint64_t> merge_bits_;
};

}  // namespace salsa
