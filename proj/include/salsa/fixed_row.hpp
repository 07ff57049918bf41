#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "salsa/slot_array.hpp"

namespace salsa {

// A row of fixed-width counters, packed. Unsigned counters saturate at
// 2^bits - 1; signed ones are two's complement clamped to +-(2^(bits-1) - 1).
class FixedRow {
 public:
  FixedRow(unsigned bits, std::size_t width, CounterEncoding encoding = CounterEncoding::Unsigned);

  unsigned counter_bits() const noexcept { return bits_; }
  std::size_t width() const noexcept { return width_; }
  CounterEncoding encoding() const noexcept { return encoding_; }
  bool saturated() const noexcept { return saturated_; }
  std::size_t memory_bits() const noexcept { return width_ * bits_; }

  std::uint64_t read_unsigned(std::size_t j) const noexcept { return load(j); }
  std::int64_t read_signed(std::size_t j) const noexcept;
  void write_unsigned(std::size_t j, std::uint64_t value);
  void write_signed(std::size_t j, std::int64_t value);

  void add_unsigned(std::size_t j, std::uint64_t value) noexcept;
  void raise_to(std::size_t j, std::uint64_t target) noexcept;
  void add_signed(std::size_t j, std::int64_t value) noexcept;

  std::uint64_t max_unsigned() const noexcept { return mask_; }
  std::int64_t max_magnitude() const noexcept { return static_cast<std::int64_t>(mask_ >> 1); }

  std::vector<std::uint8_t> payload() const;
  static FixedRow from_payload(std::span<const std::uint8_t> bytes, unsigned bits, std::size_t width,
                               CounterEncoding encoding);
  static std::size_t payload_bytes(unsigned bits, std::size_t width) noexcept {
    return (width * bits + 7) / 8;
  }

  bool operator==(const FixedRow& other) const noexcept {
    return bits_ == other.bits_ && width_ == other.width_ && encoding_ == other.encoding_ &&
           words_ == other.words_;
  }

 private:
  std::uint64_t load(std::size_t j) const noexcept {
    const std::size_t bit = j * bits_;
    return (words_[bit >> 6] >> (bit & 63)) & mask_;
  }
  void store(std::size_t j, std::uint64_t raw) noexcept {
    const std::size_t bit = j * bits_;
    const std::uint64_t m = mask_ << (bit & 63);
    std::uint64_t& word = words_[bit >> 6];
    word = (word & ~m) | ((raw << (bit & 63)) & m);
  }

  unsigned bits_;
  std::size_t width_;
  CounterEncoding encoding_;
  std::uint64_t mask_;
  bool saturated_ = false;
  std::vector<std::uint64_t> words_;
};

}  // namespace salsa
