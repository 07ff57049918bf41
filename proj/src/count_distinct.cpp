#include "salsa/count_distinct.hpp"

#include <cmath>

#include "salsa/error.hpp"

namespace salsa {

double linear_counting(double zero_slots, std::size_t width) {
  if (width < 2) throw InvalidConfig("linear counting needs at least two slots");
  const double w = static_cast<double>(width);
  const double p = zero_slots / w;
  if (!(p > 0.0)) throw AllSlotsOccupied("no zero slot left; linear counting is undefined");
  return std::log(p) / std::log1p(-1.0 / w);
}

double count_distinct(const FixedRow& row) {
  std::size_t zeros = 0;
  for (std::size_t j = 0; j < row.width(); ++j) zeros += row.read_unsigned(j) == 0 ? 1 : 0;
  return linear_counting(static_cast<double>(zeros), row.width());
}

double count_distinct(const SlotArray& row) {
  std::size_t unmerged = 0;
  std::size_t unmerged_zero = 0;
  double hidden = 0.0;
  row.for_each_counter([&](const CounterRef& ref) {
    if (ref.level == 0) {
      ++unmerged;
      unmerged_zero += row.read_unsigned(ref) == 0 ? 1 : 0;
    } else {
      hidden += static_cast<double>(ref.span() - 1);
    }
  });
  const double f = unmerged == 0 ? 0.0 : static_cast<double>(unmerged_zero) / static_cast<double>(unmerged);
  return linear_counting(static_cast<double>(unmerged_zero) + f * hidden, row.width());
}

}  // namespace salsa
