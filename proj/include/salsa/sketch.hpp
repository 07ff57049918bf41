#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "salsa/fixed_row.hpp"
#include "salsa/hash.hpp"
#include "salsa/slot_array.hpp"

namespace salsa {

enum class SketchKind : std::uint8_t { CountMin = 0, ConservativeUpdate = 1, CountSketch = 2 };
enum class Layout : std::uint8_t { Baseline = 0, Salsa = 1 };

std::string to_string(SketchKind kind);
std::string to_string(Layout layout);
std::string to_string(MergePolicy policy);

struct SketchConfig {
  static constexpr unsigned kMaxRows = 64;

  SketchKind kind = SketchKind::CountMin;
  Layout layout = Layout::Salsa;
  // Base slot width s for SALSA rows, counter width for baseline rows.
  unsigned counter_bits = 8;
  MergePolicy policy = MergePolicy::Sum;
  unsigned rows = 4;
  std::size_t width = 1024;
  std::uint64_t seed = 0;

  // Defaults: d=4 for CMS/CUS and d=5 for CS; CUS merges by max, the others by sum.
  static SketchConfig salsa(SketchKind kind, std::size_t width, std::uint64_t seed,
                            unsigned slot_bits = 8);
  static SketchConfig baseline(SketchKind kind, std::size_t width, std::uint64_t seed,
                               unsigned bits = 32);
  static unsigned default_rows(SketchKind kind) noexcept {
    return kind == SketchKind::CountSketch ? 5 : 4;
  }

  // Throws InvalidConfig on any inconsistent combination.
  void validate() const;
  // Footprint in bits of a d x w sketch with this layout, merge bits included.
  std::size_t memory_bits() const noexcept;

  bool operator==(const SketchConfig&) const = default;
};

/// Count-Min, Conservative-Update or Count Sketch over either fixed-width or
/// SALSA rows. All rows share one seeded HashFamily.
class Sketch {
 public:
  explicit Sketch(const SketchConfig& config);

  const SketchConfig& config() const noexcept { return config_; }
  const HashFamily& hashes() const noexcept { return hashes_; }
  SketchKind kind() const noexcept { return config_.kind; }
  bool is_salsa() const noexcept { return config_.layout == Layout::Salsa; }

  // Dispatches on kind. CMS/CUS reject negative weights.
  void update(std::uint64_t item, std::int64_t value);
  std::int64_t query(std::uint64_t item) const;

  void cms_update(std::uint64_t item, std::int64_t value);
  void cus_update(std::uint64_t item, std::int64_t value);
  void cs_update(std::uint64_t item, std::int64_t value);
  std::int64_t cms_query(std::uint64_t item) const;
  std::int64_t cs_query(std::uint64_t item) const;

  // Row i's estimate: the counter holding h_i(x), times g_i(x) for CS.
  std::int64_t row_estimate(unsigned row, std::uint64_t item) const;
  // Value of the counter holding slot j of a row (signed for CS).
  std::int64_t counter_at(unsigned row, std::size_t j) const;

  // Deepest merge level over all rows; 0 for baseline sketches.
  unsigned max_level() const noexcept;
  bool saturated() const noexcept;
  std::size_t memory_bits() const noexcept { return config_.memory_bits(); }

  std::vector<SlotArray>& salsa_rows() noexcept { return salsa_rows_; }
  const std::vector<SlotArray>& salsa_rows() const noexcept { return salsa_rows_; }
  std::vector<FixedRow>& baseline_rows() noexcept { return baseline_rows_; }
  const std::vector<FixedRow>& baseline_rows() const noexcept { return baseline_rows_; }

  std::vector<std::uint8_t> snapshot() const;
  static Sketch from_snapshot(std::span<const std::uint8_t> bytes);

  bool operator==(const Sketch& other) const noexcept {
    return config_ == other.config_ && salsa_rows_ == other.salsa_rows_ &&
           baseline_rows_ == other.baseline_rows_;
  }

 private:
  void require_kind(SketchKind kind, const char* op) const;

  SketchConfig config_;
  HashFamily hashes_;
  std::vector<SlotArray> salsa_rows_;
  std::vector<FixedRow> baseline_rows_;
};

// Copy of a sum-merge SALSA sketch where every aligned block of 2^level slots
// is one counter. Its estimates equal a vanilla sketch of width w / 2^level
// whose hashes are h_i >> level.
Sketch coarsen(const Sketch& sketch, unsigned level);

}  // namespace salsa
