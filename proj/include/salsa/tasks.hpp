#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "salsa/heavy_hitters.hpp"
#include "salsa/metrics.hpp"
#include "salsa/oracle.hpp"
#include "salsa/sketch.hpp"

namespace salsa {

// Feeds the stream to the sketch and offers every arriving item, with its
// estimate after the update, to the tracker.
template <typename S>
std::vector<HeavyHitter> track_heavy_hitters(HeavyHitterTracker& tracker, S& sketch,
                                             std::span<const Update> stream,
                                             std::optional<double> threshold = std::nullopt) {
  for (const Update& u : stream) {
    sketch.update(u.item, u.value);
    tracker.offer(u.item, static_cast<double>(sketch.query(u.item)));
  }
  return tracker.report(threshold);
}

// Fraction of the true top-k items (by exact frequency, ties to the lower id)
// present in `reported`.
double top_k_recall(const std::vector<HeavyHitter>& reported, const ExactOracle& oracle, std::size_t k);

struct ChangeDetection {
  std::vector<std::uint64_t> items;  // A u B, ascending
  std::vector<std::int64_t> estimates;
  std::vector<std::int64_t> truth;
  ErrorSeries errors;
};

// Sketches both halves with the same configuration, subtracts them and
// queries every item of either half.
ChangeDetection change_detection(std::span<const Update> a, std::span<const Update> b,
                                 const SketchConfig& config);

}  // namespace salsa
