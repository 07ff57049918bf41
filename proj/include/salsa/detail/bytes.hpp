#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "salsa/error.hpp"

namespace salsa::detail {

// Little-endian append-only writer for snapshot formats.
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { out_.push_back(v); }
  void put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void put_tag(std::string_view tag) { out_.insert(out_.end(), tag.begin(), tag.end()); }
  void put_bytes(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  std::vector<std::uint8_t>& bytes() noexcept { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t get_u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint64_t get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  bool get_tag(std::string_view tag) {
    need(tag.size());
    for (char c : tag) {
      if (in_[pos_++] != static_cast<std::uint8_t>(c)) return false;
    }
    return true;
  }
  std::span<const std::uint8_t> get_bytes(std::size_t n) {
    need(n);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t position() const noexcept { return pos_; }
  std::span<const std::uint8_t> rest() const noexcept { return in_.subspan(pos_); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw SnapshotError("snapshot truncated");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace salsa::detail
