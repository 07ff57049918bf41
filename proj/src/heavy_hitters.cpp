#include "salsa/heavy_hitters.hpp"

#include <cmath>

#include "salsa/error.hpp"

namespace salsa {

HeavyHitterTracker::HeavyHitterTracker(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidConfig("heavy hitter capacity must be positive");
}

HeavyHitterTracker HeavyHitterTracker::for_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidConfig("epsilon must be in (0, 1]");
  return HeavyHitterTracker(static_cast<std::size_t>(std::ceil(1.0 / epsilon)));
}

void HeavyHitterTracker::offer(std::uint64_t item, double estimate) {
  if (const auto it = index_.find(item); it != index_.end()) {
    heap_.erase({it->second, item});
    heap_.insert({estimate, item});
    it->second = estimate;
    return;
  }
  if (heap_.size() == capacity_) {
    const auto lowest = heap_.begin();
    if (!Before{}(*lowest, {estimate, item})) return;
    index_.erase(lowest->second);
    heap_.erase(lowest);
  }
  heap_.insert({estimate, item});
  index_.emplace(item, estimate);
}

std::optional<HeavyHitter> HeavyHitterTracker::minimum() const {
  if (heap_.empty()) return std::nullopt;
  return HeavyHitter{heap_.begin()->second, heap_.begin()->first};
}

std::vector<HeavyHitter> HeavyHitterTracker::report(std::optional<double> threshold) const {
  std::vector<HeavyHitter> out;
  out.reserve(heap_.size());
  for (auto it = heap_.rbegin(); it != heap_.rend(); ++it) {
    if (threshold && it->first < *threshold) break;
    out.push_back({it->second, it->first});
  }
  return out;
}

}  // namespace salsa
