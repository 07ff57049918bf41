#include "salsa/sketch.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>

#include "salsa/detail/bytes.hpp"
#include "salsa/error.hpp"

namespace salsa {

namespace {

std::int64_t clamp_to_signed(std::uint64_t v) noexcept {
  constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  return static_cast<std::int64_t>(std::min(v, kMax));
}

CounterEncoding encoding_for(SketchKind kind) noexcept {
  return kind == SketchKind::CountSketch ? CounterEncoding::SignMagnitude : CounterEncoding::Unsigned;
}

}  // namespace

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::CountMin: return "cms";
    case SketchKind::ConservativeUpdate: return "cus";
    case SketchKind::CountSketch: return "cs";
  }
  return "?";
}

std::string to_string(Layout layout) { return layout == Layout::Salsa ? "salsa" : "baseline"; }

std::string to_string(MergePolicy policy) { return policy == MergePolicy::Max ? "max" : "sum"; }

SketchConfig SketchConfig::salsa(SketchKind kind, std::size_t width, std::uint64_t seed,
                                 unsigned slot_bits) {
  SketchConfig c;
  c.kind = kind;
  c.layout = Layout::Salsa;
  c.counter_bits = slot_bits;
  c.policy = kind == SketchKind::ConservativeUpdate ? MergePolicy::Max : MergePolicy::Sum;
  c.rows = default_rows(kind);
  c.width = width;
  c.seed = seed;
  return c;
}

SketchConfig SketchConfig::baseline(SketchKind kind, std::size_t width, std::uint64_t seed,
                                    unsigned bits) {
  SketchConfig c = salsa(kind, width, seed, bits);
  c.layout = Layout::Baseline;
  c.policy = MergePolicy::Sum;
  return c;
}

void SketchConfig::validate() const {
  if (kind > SketchKind::CountSketch) throw InvalidConfig("unknown sketch kind");
  if (layout > Layout::Salsa) throw InvalidConfig("unknown layout");
  if (policy > MergePolicy::Max) throw InvalidConfig("unknown merge policy");
  if (rows == 0 || rows > kMaxRows) throw InvalidConfig("row count must be in [1, 64]");
  if (width == 0 || !std::has_single_bit(width)) throw InvalidConfig("row width must be a power of two");
  if (counter_bits == 0 || counter_bits > 64 || !std::has_single_bit(counter_bits)) {
    throw InvalidConfig("counter width must be a power of two in [1, 64] bits");
  }
  if (layout == Layout::Baseline && counter_bits < 2) {
    throw InvalidConfig("baseline counters need at least 2 bits");
  }
  if (kind == SketchKind::CountSketch) {
    if (rows % 2 == 0) throw InvalidConfig("count sketch needs an odd number of rows");
    if (layout == Layout::Salsa && policy != MergePolicy::Sum) {
      throw InvalidConfig("count sketch counters can only sum-merge");
    }
    if (layout == Layout::Salsa && counter_bits < 2) {
      throw InvalidConfig("sign-magnitude slots need at least 2 bits");
    }
  }
  if (kind == SketchKind::ConservativeUpdate && layout == Layout::Salsa && policy != MergePolicy::Max) {
    throw InvalidConfig("conservative update requires max-merge");
  }
}

std::size_t SketchConfig::memory_bits() const noexcept {
  const std::size_t per_counter = layout == Layout::Salsa ? counter_bits + 1 : counter_bits;
  return rows * width * per_counter;
}

Sketch::Sketch(const SketchConfig& config)
    : config_((config.validate(), config)), hashes_(config.seed, config.rows, config.width) {
  const CounterEncoding encoding = encoding_for(config.kind);
  if (is_salsa()) {
    salsa_rows_.reserve(config.rows);
    for (unsigned i = 0; i < config.rows; ++i) salsa_rows_.emplace_back(config.counter_bits, config.width, encoding);
  } else {
    baseline_rows_.reserve(config.rows);
    for (unsigned i = 0; i < config.rows; ++i) baseline_rows_.emplace_back(config.counter_bits, config.width, encoding);
  }
}

void Sketch::require_kind(SketchKind kind, const char* op) const {
  if (config_.kind != kind) throw InvalidConfig(std::string(op) + " called on a " + to_string(config_.kind) + " sketch");
}

void Sketch::update(std::uint64_t item, std::int64_t value) {
  switch (config_.kind) {
    case SketchKind::CountMin: cms_update(item, value); break;
    case SketchKind::ConservativeUpdate: cus_update(item, value); break;
    case SketchKind::CountSketch: cs_update(item, value); break;
  }
}

std::int64_t Sketch::query(std::uint64_t item) const {
  return config_.kind == SketchKind::CountSketch ? cs_query(item) : cms_query(item);
}

void Sketch::cms_update(std::uint64_t item, std::int64_t value) {
  require_kind(SketchKind::CountMin, "cms_update");
  if (value < 0) throw NegativeWeight("count-min accepts only non-negative weights");
  const auto v = static_cast<std::uint64_t>(value);
  for (unsigned i = 0; i < config_.rows; ++i) {
    const std::size_t j = hashes_.index(i, item);
    if (is_salsa()) {
      salsa_rows_[i].add_unsigned(j, v, config_.policy);
    } else {
      baseline_rows_[i].add_unsigned(j, v);
    }
  }
}

void Sketch::cus_update(std::uint64_t item, std::int64_t value) {
  require_kind(SketchKind::ConservativeUpdate, "cus_update");
  if (value < 0) throw NegativeWeight("conservative update accepts only non-negative weights");

  std::array<std::size_t, SketchConfig::kMaxRows> slot{};
  std::uint64_t estimate = std::numeric_limits<std::uint64_t>::max();
  for (unsigned i = 0; i < config_.rows; ++i) {
    slot[i] = hashes_.index(i, item);
    const std::uint64_t c = is_salsa() ? salsa_rows_[i].read_unsigned(salsa_rows_[i].locate(slot[i]))
                                       : baseline_rows_[i].read_unsigned(slot[i]);
    estimate = std::min(estimate, c);
  }
  const auto v = static_cast<std::uint64_t>(value);
  const std::uint64_t target =
      v > std::numeric_limits<std::uint64_t>::max() - estimate ? std::numeric_limits<std::uint64_t>::max()
                                                                : estimate + v;
  for (unsigned i = 0; i < config_.rows; ++i) {
    if (is_salsa()) {
      salsa_rows_[i].raise_to(slot[i], target, config_.policy);
    } else {
      baseline_rows_[i].raise_to(slot[i], target);
    }
  }
}

void Sketch::cs_update(std::uint64_t item, std::int64_t value) {
  require_kind(SketchKind::CountSketch, "cs_update");
  for (unsigned i = 0; i < config_.rows; ++i) {
    const std::uint64_t h = hashes_.raw(i, item);
    const std::size_t j = hashes_.index_of(h);
    const std::int64_t signed_value = HashFamily::sign_of(h) > 0 ? value : -value;
    if (is_salsa()) {
      salsa_rows_[i].add_signed(j, signed_value);
    } else {
      baseline_rows_[i].add_signed(j, signed_value);
    }
  }
}

std::int64_t Sketch::counter_at(unsigned row, std::size_t j) const {
  if (is_salsa()) {
    const SlotArray& r = salsa_rows_[row];
    const CounterRef ref = r.locate(j);
    return config_.kind == SketchKind::CountSketch ? r.read_signed(ref) : clamp_to_signed(r.read_unsigned(ref));
  }
  const FixedRow& r = baseline_rows_[row];
  return config_.kind == SketchKind::CountSketch ? r.read_signed(j) : clamp_to_signed(r.read_unsigned(j));
}

std::int64_t Sketch::row_estimate(unsigned row, std::uint64_t item) const {
  const std::uint64_t h = hashes_.raw(row, item);
  const std::int64_t c = counter_at(row, hashes_.index_of(h));
  if (config_.kind != SketchKind::CountSketch) return c;
  return HashFamily::sign_of(h) > 0 ? c : -c;
}

std::int64_t Sketch::cms_query(std::uint64_t item) const {
  if (config_.kind == SketchKind::CountSketch) throw InvalidConfig("min-query called on a cs sketch");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (unsigned i = 0; i < config_.rows; ++i) best = std::min(best, row_estimate(i, item));
  return best;
}

std::int64_t Sketch::cs_query(std::uint64_t item) const {
  require_kind(SketchKind::CountSketch, "cs_query");
  std::array<std::int64_t, SketchConfig::kMaxRows> est{};
  for (unsigned i = 0; i < config_.rows; ++i) est[i] = row_estimate(i, item);
  auto* mid = est.begin() + config_.rows / 2;
  std::nth_element(est.begin(), mid, est.begin() + config_.rows);
  return *mid;
}

unsigned Sketch::max_level() const noexcept {
  unsigned level = 0;
  for (const auto& row : salsa_rows_) level = std::max(level, row.peak_level());
  return level;
}

bool Sketch::saturated() const noexcept {
  return std::any_of(salsa_rows_.begin(), salsa_rows_.end(), [](const auto& r) { return r.saturated(); }) ||
         std::any_of(baseline_rows_.begin(), baseline_rows_.end(), [](const auto& r) { return r.saturated(); });
}

std::vector<std::uint8_t> Sketch::snapshot() const {
  detail::ByteWriter out;
  out.put_u8(static_cast<std::uint8_t>(config_.kind));
  out.put_u8(static_cast<std::uint8_t>(config_.layout));
  out.put_u8(static_cast<std::uint8_t>(config_.counter_bits));
  out.put_u8(static_cast<std::uint8_t>(config_.rows));
  out.put_u64(config_.width);
  out.put_u64(config_.seed);
  out.put_u8(static_cast<std::uint8_t>(config_.policy));
  for (const auto& row : salsa_rows_) out.put_bytes(row.snapshot());
  for (const auto& row : baseline_rows_) out.put_bytes(row.payload());
  return std::move(out.bytes());
}

Sketch Sketch::from_snapshot(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  SketchConfig config;
  config.kind = static_cast<SketchKind>(in.get_u8());
  config.layout = static_cast<Layout>(in.get_u8());
  config.counter_bits = in.get_u8();
  config.rows = in.get_u8();
  config.width = static_cast<std::size_t>(in.get_u64());
  config.seed = in.get_u64();
  config.policy = static_cast<MergePolicy>(in.get_u8());
  try {
    config.validate();
  } catch (const InvalidConfig& e) {
    throw SnapshotError(std::string("snapshot header: ") + e.what());
  }
  if (config.width > (std::size_t{1} << 40)) throw SnapshotError("implausible row width");

  Sketch sketch(config);
  const CounterEncoding encoding = encoding_for(config.kind);
  for (unsigned i = 0; i < config.rows; ++i) {
    if (sketch.is_salsa()) {
      std::size_t used = 0;
      sketch.salsa_rows_[i] = SlotArray::from_snapshot(in.rest(), encoding, &used);
      in.get_bytes(used);
      if (sketch.salsa_rows_[i].slot_bits() != config.counter_bits || sketch.salsa_rows_[i].width() != config.width) {
        throw SnapshotError("row geometry does not match the sketch header");
      }
    } else {
      const std::size_t n = FixedRow::payload_bytes(config.counter_bits, config.width);
      sketch.baseline_rows_[i] = FixedRow::from_payload(in.get_bytes(n), config.counter_bits, config.width, encoding);
    }
  }
  if (!in.rest().empty()) throw SnapshotError("trailing bytes after sketch snapshot");
  return sketch;
}

Sketch coarsen(const Sketch& sketch, unsigned level) {
  if (!sketch.is_salsa()) throw InvalidConfig("only SALSA sketches can be coarsened");
  if (sketch.config().policy != MergePolicy::Sum) throw InvalidConfig("coarsening requires sum-merge");
  if (level < sketch.max_level()) throw LevelTooSmall("target level is below the current maximum level");

  Sketch out = sketch;
  for (auto& row : out.salsa_rows()) {
    if (level > row.max_level()) throw InvalidConfig("target level exceeds the row's maximum level");
    const std::size_t span = std::size_t{1} << level;
    for (std::size_t start = 0; start < row.width(); start += span) {
      row.merge_to_level(start, level, MergePolicy::Sum);
    }
  }
  return out;
}

}  // namespace salsa
