#include "salsa/fixed_row.hpp"

#include <bit>
#include <limits>

#include "salsa/error.hpp"

namespace salsa {

FixedRow::FixedRow(unsigned bits, std::size_t width, CounterEncoding encoding)
    : bits_(bits), width_(width), encoding_(encoding) {
  if (bits < 2 || bits > 64 || !std::has_single_bit(bits)) {
    throw InvalidConfig("baseline counter width must be a power of two in [2, 64] bits");
  }
  if (width == 0 || !std::has_single_bit(width)) throw InvalidConfig("row width must be a power of two");
  mask_ = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  words_.assign((width * bits + 63) / 64, 0);
}

std::int64_t FixedRow::read_signed(std::size_t j) const noexcept {
  const std::uint64_t raw = load(j);
  if (bits_ == 64) return static_cast<std::int64_t>(raw);
  const std::uint64_t sign_bit = std::uint64_t{1} << (bits_ - 1);
  return static_cast<std::int64_t>((raw ^ sign_bit) - sign_bit);
}

void FixedRow::write_unsigned(std::size_t j, std::uint64_t value) {
  if (value > mask_) throw ValueTooWide("value does not fit the counter width");
  store(j, value);
}

void FixedRow::write_signed(std::size_t j, std::int64_t value) {
  if (value > max_magnitude() || value < -max_magnitude()) {
    throw ValueTooWide("value does not fit the counter width");
  }
  store(j, static_cast<std::uint64_t>(value));
}

void FixedRow::add_unsigned(std::size_t j, std::uint64_t value) noexcept {
  const std::uint64_t current = load(j);
  if (value > mask_ - current) {
    saturated_ = true;
    store(j, mask_);
  } else {
    store(j, current + value);
  }
}

void FixedRow::raise_to(std::size_t j, std::uint64_t target) noexcept {
  if (target > mask_) {
    saturated_ = true;
    target = mask_;
  }
  if (load(j) < target) store(j, target);
}

void FixedRow::add_signed(std::size_t j, std::int64_t value) noexcept {
  const __int128 next = static_cast<__int128>(read_signed(j)) + value;
  const __int128 cap = max_magnitude();
  __int128 clamped = next;
  if (next > cap) clamped = cap;
  if (next < -cap) clamped = -cap;
  if (clamped != next) saturated_ = true;
  store(j, static_cast<std::uint64_t>(static_cast<std::int64_t>(clamped)));
}

std::vector<std::uint8_t> FixedRow::payload() const {
  std::vector<std::uint8_t> out(payload_bytes(bits_, width_));
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b] = static_cast<std::uint8_t>(words_[b / 8] >> (8 * (b % 8)));
  }
  return out;
}

FixedRow FixedRow::from_payload(std::span<const std::uint8_t> bytes, unsigned bits, std::size_t width,
                                CounterEncoding encoding) {
  FixedRow row(bits, width, encoding);
  if (bytes.size() != payload_bytes(bits, width)) throw SnapshotError("baseline row payload size mismatch");
  for (std::size_t b = 0; b < bytes.size(); ++b) {
    row.words_[b / 8] |= std::uint64_t{bytes[b]} << (8 * (b % 8));
  }
  return row;
}

}  // namespace salsa
