#include "salsa/oracle.hpp"

#include <cmath>
#include <cstdlib>

namespace salsa {

void ExactOracle::apply(const Update& u) {
  std::int64_t& f = freq_[u.item];
  const bool was_zero = f == 0;
  f += u.value;
  volume_ += static_cast<std::uint64_t>(u.value < 0 ? -u.value : u.value);
  if (was_zero && f != 0) ++nonzero_;
  if (!was_zero && f == 0) --nonzero_;
}

std::int64_t ExactOracle::frequency(std::uint64_t item) const {
  const auto it = freq_.find(item);
  return it == freq_.end() ? 0 : it->second;
}

double ExactOracle::moment(double p) const {
  if (p == 0.0) return static_cast<double>(nonzero_);
  double total = 0.0;
  for (const auto& [item, f] : freq_) {
    if (f != 0) total += std::pow(std::fabs(static_cast<double>(f)), p);
  }
  return total;
}

}  // namespace salsa
