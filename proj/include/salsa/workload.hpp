#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "salsa/oracle.hpp"

namespace salsa {

struct ZipfSpec {
  double skew = 1.0;
  std::uint64_t universe = 100000;
  std::uint64_t length = 1000000;
  std::uint64_t seed = 0;
};

// i.i.d. unit-weight draws; the item id is the rank (1 = most frequent).
std::vector<Update> generate_zipf(const ZipfSpec& spec);

// Normalized probabilities of ranks 1..u.
std::vector<double> zipf_probabilities(double skew, std::uint64_t universe);

enum class TraceFormat : std::uint8_t { Binary = 0, Csv = 1 };

// Picks Csv for a ".csv" suffix and Binary otherwise.
TraceFormat format_for_path(const std::string& path);

/// Sequential trace reader. Binary traces are raw 16-byte little-endian
/// records (item u64, value i64) with no header. CSV traces start with the
/// header "item,value".
class TraceReader {
 public:
  TraceReader(const std::string& path, TraceFormat format);

  std::optional<Update> next();

 private:
  std::ifstream in_;
  TraceFormat format_;
  std::size_t line_ = 0;
};

std::vector<Update> read_trace(const std::string& path, TraceFormat format);
void write_trace(const std::string& path, TraceFormat format, const std::vector<Update>& records);

// First ceil(n/2) records and the rest.
std::pair<std::vector<Update>, std::vector<Update>> split_halves(const std::vector<Update>& trace);

}  // namespace salsa
