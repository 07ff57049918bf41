#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "salsa/sketch.hpp"

namespace salsa {

enum class AeeMode : std::uint8_t { Hybrid = 0, ForcedDownsample = 1 };

struct AeeParams {
  double delta = 0.001;
  // Number of initial overflow events resolved by downsampling regardless of
  // the error budgets. Zero selects plain Hybrid mode.
  unsigned forced_downsamples = 0;
  DownsampleMode downsample = DownsampleMode::Deterministic;
  // Split counters whose downsampled value fits half their width. Max-merge only.
  bool split_after_downsample = false;
};

struct AeeState {
  unsigned log2_inverse_p = 0;  // p = 2^-log2_inverse_p
  std::uint64_t volume = 0;     // pre-sampling stream volume
  double delta = 0.001;
  double delta_est = 0.001 / 4;  // delta / d
  unsigned rows = 4;
  std::size_t width = 0;
  AeeMode mode = AeeMode::Hybrid;
  unsigned forced_downsamples = 0;
  DownsampleMode downsample_mode = DownsampleMode::Deterministic;

  std::uint64_t overflow_events = 0;
  std::uint64_t downsample_events = 0;
  std::uint64_t merge_events = 0;

  double p() const noexcept { return std::ldexp(1.0, -static_cast<int>(log2_inverse_p)); }
};

// sqrt(2 ln(2/delta_est) / (p N)). Throws EmptyStream when N == 0.
double epsilon_est(double p, double delta_est, std::uint64_t volume);
double epsilon_est(const AeeState& state);
// delta^(-1/d) * 2^level / w
double epsilon_cms(double delta, unsigned rows, unsigned level, std::size_t width);
double epsilon_cms(const AeeState& state, unsigned level);

/// Count-Min or Conservative-Update sketch with sampled updates.
///
/// Updates are sampled with probability p. When a counter overflows it
/// merges, unless it is already one of the largest counters; then the sketch
/// compares the error added by downsampling (sqrt(2) * eps_est) with the
/// error of the wider layout (eps_cms at the grown level) and takes the
/// cheaper option. Downsampling halves p and every counter.
class AeeSketch {
 public:
  explicit AeeSketch(const SketchConfig& config, const AeeParams& params = {});

  void update(std::uint64_t item, std::int64_t value);
  double query(std::uint64_t item) const;

  const AeeState& state() const noexcept { return state_; }
  const Sketch& sketch() const noexcept { return sketch_; }

 private:
  enum class Resolution { Merge, Downsample };

  std::uint64_t sample(std::uint64_t value);
  Resolution resolve_overflow(const CounterRef& ref, unsigned row_max_level);
  void downsample();
  void split_fitting_counters(SlotArray& row);

  Sketch sketch_;
  AeeState state_;
  bool split_after_downsample_;
  std::mt19937_64 rng_;
};

}  // namespace salsa
