#include "salsa/slot_array.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <limits>

#include "salsa/detail/bytes.hpp"
#include "salsa/error.hpp"

namespace salsa {

namespace {

constexpr std::uint8_t kSnapshotVersion = 1;

std::uint64_t low_mask(unsigned bits) noexcept { return bits == 0 ? 0 : ~std::uint64_t{0} >> (64 - bits); }

// kChainMasks[m][p]: merge bits, within p's bitmap word, of the blocks at
// levels 1..m that contain position p.
constexpr auto kChainMasks = [] {
  std::array<std::array<std::uint64_t, 64>, 7> t{};
  for (unsigned m = 0; m < 7; ++m) {
    for (unsigned p = 0; p < 64; ++p) {
      for (unsigned l = 1; l <= m; ++l) {
        t[m][p] |= std::uint64_t{1} << (((p >> l) << l) + (1U << (l - 1)) - 1);
      }
    }
  }
  return t;
}();

unsigned compute_max_level(unsigned slot_bits, std::size_t width) {
  const unsigned by_bits = static_cast<unsigned>(std::countr_zero(64U / slot_bits));
  const unsigned by_width = static_cast<unsigned>(std::countr_zero(width));
  return std::min(by_bits, by_width);
}

std::uint64_t abs_u64(std::int64_t v) noexcept {
  return v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
}

}  // namespace

SlotArray::SlotArray(unsigned slot_bits, std::size_t width, CounterEncoding encoding)
    : slot_bits_(slot_bits), width_(width), encoding_(encoding) {
  if (slot_bits == 0 || slot_bits > 64 || !std::has_single_bit(slot_bits)) {
    throw InvalidConfig("slot width must be a power of two in [1, 64] bits");
  }
  if (width == 0 || !std::has_single_bit(width)) {
    throw InvalidConfig("row width must be a power of two");
  }
  max_level_ = compute_max_level(slot_bits, width);
  chain_masks_ = kChainMasks[max_level_].data();
  slots_.assign((width * slot_bits + 63) / 64, 0);
  merge_bits_.assign((width + 63) / 64, 0);
}

std::uint64_t SlotArray::load_raw(CounterRef ref) const noexcept {
  const std::size_t bit = ref.offset * slot_bits_;
  const unsigned bits = counter_bits(ref);
  return (slots_[bit >> 6] >> (bit & 63)) & low_mask(bits);
}

void SlotArray::store_raw(CounterRef ref, std::uint64_t raw) noexcept {
  const std::size_t bit = ref.offset * slot_bits_;
  const std::uint64_t mask = low_mask(counter_bits(ref)) << (bit & 63);
  std::uint64_t& word = slots_[bit >> 6];
  word = (word & ~mask) | ((raw << (bit & 63)) & mask);
}

void SlotArray::write_unsigned(CounterRef ref, std::uint64_t value) {
  if (value > capacity(ref)) throw ValueTooWide("value does not fit the counter width");
  store_raw(ref, value);
}

std::int64_t SlotArray::read_signed(CounterRef ref) const noexcept {
  const unsigned bits = counter_bits(ref);
  const std::uint64_t raw = load_raw(ref);
  const auto magnitude = static_cast<std::int64_t>(raw & low_mask(bits - 1));
  return (raw >> (bits - 1)) & 1U ? -magnitude : magnitude;
}

void SlotArray::write_signed(CounterRef ref, std::int64_t value) {
  const std::uint64_t magnitude = abs_u64(value);
  if (magnitude > capacity(ref)) throw ValueTooWide("magnitude does not fit the counter width");
  const unsigned bits = counter_bits(ref);
  const std::uint64_t sign = value < 0 ? std::uint64_t{1} << (bits - 1) : 0;
  store_raw(ref, sign | magnitude);
}

std::uint64_t SlotArray::resolve_unsigned(std::size_t block_start, unsigned level,
                                          MergePolicy policy) const noexcept {
  const std::size_t end = block_start + (std::size_t{1} << level);
  std::uint64_t acc = 0;
  for (std::size_t j = block_start; j < end;) {
    const CounterRef ref = locate(j);
    const std::uint64_t v = read_unsigned(ref);
    acc = policy == MergePolicy::Sum ? acc + v : std::max(acc, v);
    j += ref.span();
  }
  return acc;
}

std::int64_t SlotArray::resolve_signed(std::size_t block_start, unsigned level) const noexcept {
  const std::size_t end = block_start + (std::size_t{1} << level);
  std::int64_t acc = 0;
  for (std::size_t j = block_start; j < end;) {
    const CounterRef ref = locate(j);
    acc += read_signed(ref);
    j += ref.span();
  }
  return acc;
}

CounterRef SlotArray::merge_up(CounterRef ref, MergePolicy policy) {
  assert(locate(ref.offset) == ref);
  if (ref.level >= max_level_) throw MaxLevelReached("counter is already at the maximum level");
  if (is_signed() && policy == MergePolicy::Max) {
    throw InvalidConfig("max-merge is undefined for signed counters");
  }

  const std::size_t group = ref.offset >> ref.level;
  const std::size_t sibling = (group ^ 1U) << ref.level;
  const CounterRef parent{std::min(ref.offset, sibling), ref.level + 1};

  if (is_signed()) {
    const std::int64_t merged = read_signed(ref) + resolve_signed(sibling, ref.level);
    for (std::size_t j = parent.offset; j + 1 < parent.offset + parent.span(); ++j) set_merge_bit(j);
    write_signed(parent, merged);
  } else {
    const std::uint64_t own = read_unsigned(ref);
    const std::uint64_t other = resolve_unsigned(sibling, ref.level, policy);
    const std::uint64_t merged = policy == MergePolicy::Sum ? own + other : std::max(own, other);
    for (std::size_t j = parent.offset; j + 1 < parent.offset + parent.span(); ++j) set_merge_bit(j);
    store_raw(parent, merged);
  }
  peak_level_ = std::max(peak_level_, parent.level);
  return parent;
}

CounterRef SlotArray::grow_and_add(CounterRef ref, std::uint64_t value, MergePolicy policy) {
  std::uint64_t current = read_unsigned(ref);
  while (value > capacity(ref) - current) {
    if (ref.level == max_level_) {
      saturated_ = true;
      store_raw(ref, capacity(ref));
      return ref;
    }
    ref = merge_up(ref, policy);
    current = read_unsigned(ref);
  }
  store_raw(ref, current + value);
  return ref;
}

CounterRef SlotArray::raise_to(std::size_t j, std::uint64_t target, MergePolicy policy) {
  CounterRef ref = locate(j);
  std::uint64_t current = read_unsigned(ref);
  while (current < target && target > capacity(ref)) {
    if (ref.level == max_level_) {
      saturated_ = true;
      store_raw(ref, capacity(ref));
      return ref;
    }
    ref = merge_up(ref, policy);
    current = read_unsigned(ref);
  }
  if (current < target) store_raw(ref, target);
  return ref;
}

CounterRef SlotArray::add_signed(std::size_t j, std::int64_t value, MergePolicy policy) {
  CounterRef ref = locate(j);
  __int128 next = static_cast<__int128>(read_signed(ref)) + value;
  auto magnitude = [](__int128 v) { return v < 0 ? -v : v; };
  while (magnitude(next) > static_cast<__int128>(capacity(ref))) {
    if (ref.level == max_level_) {
      saturated_ = true;
      const auto cap = static_cast<std::int64_t>(capacity(ref));
      write_signed(ref, next < 0 ? -cap : cap);
      return ref;
    }
    ref = merge_up(ref, policy);
    next = static_cast<__int128>(read_signed(ref)) + value;
  }
  write_signed(ref, static_cast<std::int64_t>(next));
  return ref;
}

void SlotArray::scale_down_all(DownsampleMode mode, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  scale_down_all(mode, rng);
}

void SlotArray::scale_down_all(DownsampleMode mode, std::mt19937_64& rng) {
  if (is_signed()) throw InvalidConfig("downsampling requires unsigned counters");
  for (std::size_t j = 0; j < width_;) {
    const CounterRef ref = locate(j);
    const std::uint64_t v = read_unsigned(ref);
    if (v != 0) {
      if (mode == DownsampleMode::Deterministic) {
        store_raw(ref, v >> 1);
      } else {
        std::binomial_distribution<std::uint64_t> half(v, 0.5);
        store_raw(ref, half(rng));
      }
    }
    j += ref.span();
  }
}

std::pair<CounterRef, CounterRef> SlotArray::split(CounterRef ref, MergePolicy policy) {
  assert(locate(ref.offset) == ref);
  if (policy != MergePolicy::Max) throw SplitNotMaxMerge("only max-merged counters can be split");
  if (ref.level == 0) throw SplitUnrepresentable("a base slot cannot be split");

  const CounterRef left{ref.offset, ref.level - 1};
  const CounterRef right{ref.offset + left.span(), ref.level - 1};
  const std::uint64_t value = read_unsigned(ref);
  if (value > capacity(left)) throw SplitUnrepresentable("value does not fit the half-width counters");

  clear_merge_bit(merge_bit_index(ref.offset, ref.level));
  store_raw(left, value);
  store_raw(right, value);
  if (ref.level == peak_level_) recompute_peak_level();
  return {left, right};
}

CounterRef SlotArray::merge_to_level(std::size_t j, unsigned level, MergePolicy policy) {
  CounterRef ref = locate(j);
  while (ref.level < level) ref = merge_up(ref, policy);
  return ref;
}

void SlotArray::recompute_peak_level() noexcept {
  unsigned peak = 0;
  for_each_counter([&](CounterRef ref) { peak = std::max(peak, ref.level); });
  peak_level_ = peak;
}

std::vector<std::uint8_t> SlotArray::snapshot() const {
  detail::ByteWriter out;
  out.put_tag("SLSA");
  out.put_u8(kSnapshotVersion);
  out.put_u8(static_cast<std::uint8_t>(slot_bits_));
  out.put_u64(width_);
  out.put_u8(static_cast<std::uint8_t>(max_level_));

  const std::size_t bitmap_bytes = (width_ + 7) / 8;
  for (std::size_t b = 0; b < bitmap_bytes; ++b) {
    out.put_u8(static_cast<std::uint8_t>(merge_bits_[b / 8] >> (8 * (b % 8))));
  }
  const std::size_t payload_bytes = (width_ * slot_bits_ + 7) / 8;
  for (std::size_t b = 0; b < payload_bytes; ++b) {
    out.put_u8(static_cast<std::uint8_t>(slots_[b / 8] >> (8 * (b % 8))));
  }
  return std::move(out.bytes());
}

SlotArray SlotArray::from_snapshot(std::span<const std::uint8_t> bytes, CounterEncoding encoding,
                                   std::size_t* consumed) {
  detail::ByteReader in(bytes);
  if (!in.get_tag("SLSA")) throw SnapshotError("bad slot array magic");
  if (in.get_u8() != kSnapshotVersion) throw SnapshotError("unsupported slot array version");
  const unsigned slot_bits = in.get_u8();
  const std::uint64_t width = in.get_u64();
  const unsigned max_level = in.get_u8();
  if (width > (std::uint64_t{1} << 40)) throw SnapshotError("implausible row width");

  SlotArray array = [&] {
    try {
      return SlotArray(slot_bits, static_cast<std::size_t>(width), encoding);
    } catch (const InvalidConfig& e) {
      throw SnapshotError(e.what());
    }
  }();
  if (array.max_level_ != max_level) throw SnapshotError("max level does not match geometry");

  auto bitmap = in.get_bytes((array.width_ + 7) / 8);
  for (std::size_t b = 0; b < bitmap.size(); ++b) {
    array.merge_bits_[b / 8] |= std::uint64_t{bitmap[b]} << (8 * (b % 8));
  }
  auto payload = in.get_bytes((array.width_ * slot_bits + 7) / 8);
  for (std::size_t b = 0; b < payload.size(); ++b) {
    array.slots_[b / 8] |= std::uint64_t{payload[b]} << (8 * (b % 8));
  }
  if (auto violation = array.find_violation()) throw SnapshotError(*violation);
  array.recompute_peak_level();
  if (consumed != nullptr) *consumed = in.position();
  return array;
}

std::optional<std::string> SlotArray::find_violation() const {
  // Padding bits past the last slot or merge bit must stay clear.
  if (width_ % 64 != 0 && (merge_bits_.back() >> (width_ % 64)) != 0) {
    return "merge bits set past the end of the row";
  }
  const std::size_t payload_bits = width_ * slot_bits_;
  if (payload_bits % 64 != 0 && (slots_.back() >> (payload_bits % 64)) != 0) {
    return "slot bits set past the end of the row";
  }

  for (std::size_t j = 0; j < width_; ++j) {
    if (!merge_bit(j)) continue;
    // Index j is the merge bit of level L where j mod 2^L == 2^(L-1) - 1.
    const unsigned level = static_cast<unsigned>(std::countr_one(j)) + 1;
    if (level > max_level_) return "merge bit " + std::to_string(j) + " encodes a level above the maximum";
    if (level >= 2) {
      const std::size_t block = (j >> level) << level;
      const std::size_t half = std::size_t{1} << (level - 1);
      if (!merge_bit(merge_bit_index(block, level - 1)) ||
          !merge_bit(merge_bit_index(block + half, level - 1))) {
        return "downward closure broken at merge bit " + std::to_string(j);
      }
    }
  }

  std::size_t expected = 0;
  std::optional<std::string> problem;
  for_each_counter([&](CounterRef ref) {
    if (problem) return;
    if (ref.offset != expected || ref.offset % ref.span() != 0) {
      problem = "counter at " + std::to_string(ref.offset) + " is misaligned";
    } else if (is_signed()) {
      const unsigned bits = counter_bits(ref);
      if (load_raw(ref) == (std::uint64_t{1} << (bits - 1))) {
        problem = "non-canonical negative zero at " + std::to_string(ref.offset);
      }
    }
    expected = ref.offset + ref.span();
  });
  return problem;
}

bool SlotArray::operator==(const SlotArray& other) const noexcept {
  return slot_bits_ == other.slot_bits_ && width_ == other.width_ && encoding_ == other.encoding_ &&
         slots_ == other.slots_ && merge_bits_ == other.merge_bits_;
}

}  // namespace salsa
