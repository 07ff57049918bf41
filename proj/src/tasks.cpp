#include "salsa/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "salsa/algebra.hpp"
#include "salsa/error.hpp"

namespace salsa {

double top_k_recall(const std::vector<HeavyHitter>& reported, const ExactOracle& oracle, std::size_t k) {
  std::vector<std::pair<std::int64_t, std::uint64_t>> ranked;
  ranked.reserve(oracle.frequencies().size());
  for (const auto& [item, f] : oracle.frequencies()) {
    if (f > 0) ranked.emplace_back(f, item);
  }
  if (ranked.empty()) throw EmptyOracle("no item has positive frequency");
  k = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                    [](const auto& x, const auto& y) { return x.first != y.first ? x.first > y.first : x.second < y.second; });

  std::unordered_set<std::uint64_t> found;
  for (const HeavyHitter& h : reported) found.insert(h.item);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += found.count(ranked[i].second);
  return static_cast<double>(hits) / static_cast<double>(k);
}

ChangeDetection change_detection(std::span<const Update> a, std::span<const Update> b,
                                 const SketchConfig& config) {
  if (config.kind != SketchKind::CountSketch) throw InvalidConfig("change detection needs a count sketch");
  Sketch sa(config);
  Sketch sb(config);
  ExactOracle oracle;
  for (const Update& u : a) {
    sa.update(u.item, u.value);
    oracle.apply(u);
  }
  for (const Update& u : b) {
    sb.update(u.item, u.value);
    oracle.apply({u.item, -u.value});
  }
  const Sketch diff = subtract_sketches(sa, sb);

  ChangeDetection out;
  out.items.reserve(oracle.frequencies().size());
  for (const auto& [item, f] : oracle.frequencies()) out.items.push_back(item);
  std::sort(out.items.begin(), out.items.end());
  for (const std::uint64_t x : out.items) {
    const std::int64_t est = diff.query(x);
    const std::int64_t f = oracle.frequency(x);
    out.estimates.push_back(est);
    out.truth.push_back(f);
    out.errors.errors.push_back(std::fabs(static_cast<double>(est) - static_cast<double>(f)));
  }
  return out;
}

}  // namespace salsa
