#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>

namespace salsa {

struct Update {
  std::uint64_t item = 0;
  std::int64_t value = 1;

  bool operator==(const Update&) const = default;
};

// Exact frequencies of everything applied so far.
class ExactOracle {
 public:
  void apply(const Update& u);
  void apply(std::uint64_t item, std::int64_t value) { apply({item, value}); }

  std::int64_t frequency(std::uint64_t item) const;
  // Sum of |v| over all updates.
  std::uint64_t volume() const noexcept { return volume_; }
  // Items whose frequency is currently non-zero.
  std::size_t distinct_count() const noexcept { return nonzero_; }
  bool empty() const noexcept { return nonzero_ == 0; }

  // F_p = sum |f_x|^p over items with f_x != 0; p == 0 gives the distinct count.
  double moment(double p) const;

  const std::unordered_map<std::uint64_t, std::int64_t>& frequencies() const noexcept { return freq_; }

 private:
  std::unordered_map<std::uint64_t, std::int64_t> freq_;
  std::uint64_t volume_ = 0;
  std::size_t nonzero_ = 0;
};

}  // namespace salsa
