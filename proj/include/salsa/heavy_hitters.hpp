#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

namespace salsa {

struct HeavyHitter {
  std::uint64_t item = 0;
  double estimate = 0.0;

  bool operator==(const HeavyHitter&) const = default;
};

/// The k items with the highest estimates seen so far. An entry is refreshed
/// only when its item is offered again. Among equal estimates the lower item
/// id ranks higher.
class HeavyHitterTracker {
 public:
  explicit HeavyHitterTracker(std::size_t capacity);
  // Capacity ceil(1/epsilon).
  static HeavyHitterTracker for_epsilon(double epsilon);

  void offer(std::uint64_t item, double estimate);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return heap_.size(); }
  bool contains(std::uint64_t item) const { return index_.count(item) != 0; }
  std::optional<HeavyHitter> minimum() const;

  // Highest estimate first; with a threshold only entries >= threshold.
  std::vector<HeavyHitter> report(std::optional<double> threshold = std::nullopt) const;

 private:
  // Ordered so that begin() is the next entry to evict.
  struct Before {
    bool operator()(const std::pair<double, std::uint64_t>& a,
                    const std::pair<double, std::uint64_t>& b) const noexcept {
      return a.first != b.first ? a.first < b.first : a.second > b.second;
    }
  };

  std::size_t capacity_;
  std::set<std::pair<double, std::uint64_t>, Before> heap_;
  std::unordered_map<std::uint64_t, double> index_;
};

}  // namespace salsa
