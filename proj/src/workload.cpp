#include "salsa/workload.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <random>

#include "salsa/detail/bytes.hpp"
#include "salsa/error.hpp"

namespace salsa {

std::vector<double> zipf_probabilities(double skew, std::uint64_t universe) {
  if (!(skew > 0.0)) throw InvalidConfig("zipf skew must be positive");
  if (universe == 0) throw InvalidConfig("zipf universe must be non-empty");
  std::vector<double> p(universe);
  double total = 0.0;
  for (std::uint64_t r = 1; r <= universe; ++r) {
    p[r - 1] = std::pow(static_cast<double>(r), -skew);
    total += p[r - 1];
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<Update> generate_zipf(const ZipfSpec& spec) {
  const std::vector<double> p = zipf_probabilities(spec.skew, spec.universe);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[i] = acc;
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<Update> out;
  out.reserve(spec.length);
  for (std::uint64_t i = 0; i < spec.length; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t rank = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    out.push_back({rank + 1, 1});
  }
  return out;
}

TraceFormat format_for_path(const std::string& path) {
  const std::string ext = ".csv";
  const bool csv = path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
  return csv ? TraceFormat::Csv : TraceFormat::Binary;
}

TraceReader::TraceReader(const std::string& path, TraceFormat format)
    : in_(path, std::ios::binary), format_(format) {
  if (!in_) throw IoError("cannot open trace " + path);
  if (format_ == TraceFormat::Csv) {
    std::string header;
    ++line_;
    if (!std::getline(in_, header)) throw ParseError(line_, "missing header");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "item,value") throw ParseError(line_, "expected header 'item,value'");
  }
}

std::optional<Update> TraceReader::next() {
  if (format_ == TraceFormat::Binary) {
    std::array<char, 16> buf{};
    in_.read(buf.data(), buf.size());
    if (in_.gcount() == 0) return std::nullopt;
    if (in_.gcount() != 16) throw IoError("truncated binary trace record");
    detail::ByteReader r({reinterpret_cast<const std::uint8_t*>(buf.data()), buf.size()});
    const std::uint64_t item = r.get_u64();
    const auto value = static_cast<std::int64_t>(r.get_u64());
    return Update{item, value};
  }

  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(line_, "expected 'item,value'");
    Update u;
    const char* end = line.data() + line.size();
    const auto [p1, e1] = std::from_chars(line.data(), line.data() + comma, u.item);
    if (e1 != std::errc{} || p1 != line.data() + comma) throw ParseError(line_, "bad item id");
    const auto [p2, e2] = std::from_chars(line.data() + comma + 1, end, u.value);
    if (e2 != std::errc{} || p2 != end) throw ParseError(line_, "bad value");
    return u;
  }
  if (in_.bad()) throw IoError("read error");
  return std::nullopt;
}

std::vector<Update> read_trace(const std::string& path, TraceFormat format) {
  TraceReader reader(path, format);
  std::vector<Update> out;
  while (auto u = reader.next()) out.push_back(*u);
  return out;
}

void write_trace(const std::string& path, TraceFormat format, const std::vector<Update>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (format == TraceFormat::Binary) {
    detail::ByteWriter w;
    for (const Update& u : records) {
      w.put_u64(u.item);
      w.put_u64(static_cast<std::uint64_t>(u.value));
    }
    const auto& bytes = w.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  } else {
    out << "item,value\n";
    for (const Update& u : records) out << u.item << ',' << u.value << '\n';
  }
  if (!out) throw IoError("write to " + path + " failed");
}

std::pair<std::vector<Update>, std::vector<Update>> split_halves(const std::vector<Update>& trace) {
  const auto mid = trace.begin() + static_cast<std::ptrdiff_t>((trace.size() + 1) / 2);
  return {std::vector<Update>(trace.begin(), mid), std::vector<Update>(mid, trace.end())};
}

}  // namespace salsa
