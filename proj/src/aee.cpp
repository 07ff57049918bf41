#include "salsa/aee.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "salsa/error.hpp"

namespace salsa {

namespace {

constexpr unsigned kMinLog2P = 62;

}  // namespace

double epsilon_est(double p, double delta_est, std::uint64_t volume) {
  if (volume == 0) throw EmptyStream("estimator error is undefined before any update");
  return std::sqrt(2.0 * std::log(2.0 / delta_est) / (p * static_cast<double>(volume)));
}

double epsilon_est(const AeeState& state) { return epsilon_est(state.p(), state.delta_est, state.volume); }

double epsilon_cms(double delta, unsigned rows, unsigned level, std::size_t width) {
  return std::pow(delta, -1.0 / rows) * std::ldexp(1.0, static_cast<int>(level)) / static_cast<double>(width);
}

double epsilon_cms(const AeeState& state, unsigned level) {
  return epsilon_cms(state.delta, state.rows, level, state.width);
}

AeeSketch::AeeSketch(const SketchConfig& config, const AeeParams& params)
    : sketch_(config),
      split_after_downsample_(params.split_after_downsample),
      rng_(mix64(config.seed ^ 0xaee0aee0aee0aee0ULL)) {
  if (config.kind == SketchKind::CountSketch) throw InvalidConfig("estimators integrate with count-min and conservative update only");
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw InvalidConfig("delta must be in (0, 1)");
  if (params.split_after_downsample && (!sketch_.is_salsa() || config.policy != MergePolicy::Max)) {
    throw InvalidConfig("counter splitting requires max-merge SALSA rows");
  }
  state_.delta = params.delta;
  state_.delta_est = params.delta / config.rows;
  state_.rows = config.rows;
  state_.width = config.width;
  state_.mode = params.forced_downsamples > 0 ? AeeMode::ForcedDownsample : AeeMode::Hybrid;
  state_.forced_downsamples = params.forced_downsamples;
  state_.downsample_mode = params.downsample;
}

std::uint64_t AeeSketch::sample(std::uint64_t value) {
  const unsigned k = state_.log2_inverse_p;
  if (k == 0) return value;
  const std::uint64_t whole = value >> k;
  const std::uint64_t rest = value & ((std::uint64_t{1} << k) - 1);
  const bool extra = rest != 0 && (rng_() >> (64 - k)) < rest;
  return whole + (extra ? 1 : 0);
}

AeeSketch::Resolution AeeSketch::resolve_overflow(const CounterRef& ref, unsigned row_max_level) {
  if (state_.overflow_events <= state_.forced_downsamples) return Resolution::Downsample;
  if (!sketch_.is_salsa() || ref.level >= row_max_level) return Resolution::Downsample;
  if (ref.level < sketch_.max_level()) return Resolution::Merge;

  const double downsample_cost = std::sqrt(2.0) * epsilon_est(state_);
  const double merge_cost = epsilon_cms(state_, ref.level + 1);
  return merge_cost <= downsample_cost ? Resolution::Merge : Resolution::Downsample;
}

void AeeSketch::downsample() {
  if (state_.log2_inverse_p >= kMinLog2P) throw Error("sampling probability underflow");
  ++state_.log2_inverse_p;
  ++state_.downsample_events;
  for (auto& row : sketch_.salsa_rows()) {
    row.scale_down_all(state_.downsample_mode, rng_);
    if (split_after_downsample_) split_fitting_counters(row);
  }
  for (auto& row : sketch_.baseline_rows()) {
    for (std::size_t j = 0; j < row.width(); ++j) {
      const std::uint64_t v = row.read_unsigned(j);
      if (v == 0) continue;
      if (state_.downsample_mode == DownsampleMode::Deterministic) {
        row.write_unsigned(j, v >> 1);
      } else {
        std::binomial_distribution<std::uint64_t> half(v, 0.5);
        row.write_unsigned(j, half(rng_));
      }
    }
  }
}

void AeeSketch::split_fitting_counters(SlotArray& row) {
  for (std::size_t j = 0; j < row.width();) {
    const CounterRef ref = row.locate(j);
    if (ref.level > 0 && row.read_unsigned(ref) <= row.capacity({ref.offset, ref.level - 1})) {
      row.split(ref, MergePolicy::Max);
      continue;  // the left half may split again
    }
    j += ref.span();
  }
}

void AeeSketch::update(std::uint64_t item, std::int64_t value) {
  if (value < 0) throw NegativeWeight("estimator sketches accept only non-negative weights");
  state_.volume += static_cast<std::uint64_t>(value);
  std::uint64_t increment = sample(static_cast<std::uint64_t>(value));
  if (increment == 0) return;

  const SketchConfig& config = sketch_.config();
  const bool conservative = config.kind == SketchKind::ConservativeUpdate;
  const bool salsa = sketch_.is_salsa();
  auto& salsa_rows = sketch_.salsa_rows();
  auto& baseline_rows = sketch_.baseline_rows();

  std::array<std::size_t, SketchConfig::kMaxRows> slot{};
  for (unsigned i = 0; i < config.rows; ++i) slot[i] = sketch_.hashes().index(i, item);

  auto current = [&](unsigned i, CounterRef& ref) -> std::uint64_t {
    if (salsa) {
      ref = salsa_rows[i].locate(slot[i]);
      return salsa_rows[i].read_unsigned(ref);
    }
    ref = {slot[i], 0};
    return baseline_rows[i].read_unsigned(slot[i]);
  };
  auto capacity = [&](unsigned i, const CounterRef& ref) {
    return salsa ? salsa_rows[i].capacity(ref) : baseline_rows[i].max_unsigned();
  };

  // Make room in every row first; a downsample restarts the pass with the
  // thinned increment and (for CUS) a fresh pre-update estimate.
  std::uint64_t target = 0;
  for (bool restart = true; restart;) {
    restart = false;
    if (conservative) {
      std::uint64_t estimate = std::numeric_limits<std::uint64_t>::max();
      for (unsigned i = 0; i < config.rows; ++i) {
        CounterRef ref;
        estimate = std::min(estimate, current(i, ref));
      }
      target = estimate + increment;
    }
    for (unsigned i = 0; i < config.rows && !restart; ++i) {
      for (;;) {
        CounterRef ref;
        const std::uint64_t c = current(i, ref);
        const std::uint64_t cap = capacity(i, ref);
        const bool fits = conservative ? (c >= target || target <= cap) : increment <= cap - c;
        if (fits) break;

        ++state_.overflow_events;
        const unsigned row_max = salsa ? salsa_rows[i].max_level() : 0;
        if (resolve_overflow(ref, row_max) == Resolution::Merge) {
          salsa_rows[i].merge_up(ref, config.policy);
          ++state_.merge_events;
          continue;
        }
        downsample();
        increment = (increment >> 1) + ((increment & 1U) != 0 && (rng_() & 1U) != 0 ? 1 : 0);
        if (increment == 0) return;
        restart = true;
        break;
      }
    }
  }

  for (unsigned i = 0; i < config.rows; ++i) {
    CounterRef ref;
    const std::uint64_t c = current(i, ref);
    const std::uint64_t next = conservative ? std::max(c, target) : c + increment;
    if (salsa) {
      salsa_rows[i].write_unsigned(ref, next);
    } else {
      baseline_rows[i].write_unsigned(slot[i], next);
    }
  }
}

double AeeSketch::query(std::uint64_t item) const {
  return std::ldexp(static_cast<double>(sketch_.query(item)), static_cast<int>(state_.log2_inverse_p));
}

}  // namespace salsa
