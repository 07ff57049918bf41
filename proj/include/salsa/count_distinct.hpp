#pragma once

#include <cstddef>

#include "salsa/fixed_row.hpp"
#include "salsa/slot_array.hpp"

namespace salsa {

// ln(p) / ln(1 - 1/w) for a zero fraction p. Throws AllSlotsOccupied when
// p == 0.
double linear_counting(double zero_slots, std::size_t width);

// Linear counting on a fixed-width row.
double count_distinct(const FixedRow& row);

// Linear counting on a SALSA row. Unmerged slots are counted directly. A
// merged level-l counter is taken to hide 2^l - 1 further slots that are zero
// with the same frequency f as the unmerged ones.
double count_distinct(const SlotArray& row);

}  // namespace salsa
