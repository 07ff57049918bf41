#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "salsa/oracle.hpp"

namespace salsa {

// Per-update absolute errors of an on-arrival run.
struct ErrorSeries {
  std::vector<double> errors;

  std::size_t size() const noexcept { return errors.size(); }
};

// sqrt(sum e_i^2 / n) / n. Throws EmptySeries for n == 0.
double nrmse(const ErrorSeries& series);

using Estimator = std::function<double(std::uint64_t)>;

// Averages over the items with positive frequency. Throw EmptyOracle when
// there are none.
double aae(const Estimator& estimate, const ExactOracle& oracle);
double are(const Estimator& estimate, const ExactOracle& oracle);

// Applies each update to the sketch and the oracle, then records
// |query(x) - f_x| with the current update included.
template <typename S>
ErrorSeries on_arrival_run(S& sketch, std::span<const Update> stream, ExactOracle& oracle) {
  ErrorSeries series;
  series.errors.reserve(stream.size());
  for (const Update& u : stream) {
    sketch.update(u.item, u.value);
    oracle.apply(u);
    const double truth = static_cast<double>(oracle.frequency(u.item));
    const double diff = static_cast<double>(sketch.query(u.item)) - truth;
    series.errors.push_back(diff < 0 ? -diff : diff);
  }
  return series;
}

template <typename S>
ErrorSeries on_arrival_run(S& sketch, std::span<const Update> stream) {
  ExactOracle oracle;
  return on_arrival_run(sketch, stream, oracle);
}

}  // namespace salsa
