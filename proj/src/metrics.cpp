#include "salsa/metrics.hpp"

#include <cmath>

#include "salsa/error.hpp"

namespace salsa {

double nrmse(const ErrorSeries& series) {
  if (series.errors.empty()) throw EmptySeries("no errors recorded");
  double sum_sq = 0.0;
  for (const double e : series.errors) sum_sq += e * e;
  const double n = static_cast<double>(series.errors.size());
  return std::sqrt(sum_sq / n) / n;
}

namespace {

template <typename Term>
double average_over_positive(const ExactOracle& oracle, Term term) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& [item, f] : oracle.frequencies()) {
    if (f <= 0) continue;
    total += term(item, static_cast<double>(f));
    ++count;
  }
  if (count == 0) throw EmptyOracle("no item has positive frequency");
  return total / static_cast<double>(count);
}

}  // namespace

double aae(const Estimator& estimate, const ExactOracle& oracle) {
  return average_over_positive(oracle, [&](std::uint64_t x, double f) { return std::fabs(estimate(x) - f); });
}

double are(const Estimator& estimate, const ExactOracle& oracle) {
  return average_over_positive(oracle, [&](std::uint64_t x, double f) { return std::fabs(estimate(x) - f) / f; });
}

}  // namespace salsa
