#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "salsa/sketch.hpp"
#include "salsa/workload.hpp"

namespace salsa::bench {

// Bad flag combinations detected after parsing; exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct RunSpec {
  SketchKind kind = SketchKind::CountMin;
  Layout layout = Layout::Salsa;
  std::optional<MergePolicy> policy;  // kind default when unset
  unsigned bits = 32;
  unsigned s = 8;
  std::optional<unsigned> rows;
  std::vector<std::uint64_t> budgets;  // bytes
  std::optional<std::string> trace_path;
  std::optional<ZipfSpec> zipf;  // seed field replaced by each run seed
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> tasks{"on_arrival"};
  bool aee = false;
  double delta = 0.001;
  unsigned forced_downsamples = 0;
  std::size_t top_k = 64;
  double phi = 0.001;
};

struct Row {
  std::string sketch_kind;
  std::string layout;
  std::string policy;
  unsigned s = 0;
  unsigned d = 0;
  std::size_t w = 0;
  std::uint64_t memory_bytes = 0;
  std::string seed;  // a seed, or mean / ci95_low / ci95_high for summaries
  std::string task;
  std::string metric;
  double value = 0.0;
};

const std::vector<std::string>& known_tasks();

// Config for `spec` at the given budget: w is the largest power of two whose
// footprint fits. Throws UsageError when not even w = 2 fits.
SketchConfig config_for_budget(const RunSpec& spec, std::uint64_t budget_bytes, std::uint64_t seed);

// Exact footprint in bytes, merge bits included.
std::uint64_t footprint_bytes(const SketchConfig& config);

// Per-seed rows followed by mean and 95% Student-t interval rows for each
// (budget, task, metric) group. Warnings go to `log`.
std::vector<Row> run(RunSpec spec, std::ostream& log);

void write_rows(std::ostream& out, const std::vector<Row>& rows, OutputFormat format);

}  // namespace salsa::bench
