#pragma once

#include <cstdint>

#include "salsa/sketch.hpp"

namespace salsa {

enum class CombineKind : std::uint8_t { Merge = 0, Subtract = 1 };

// Sketch of the concatenation of both input streams. Each result counter is
// at least as wide as the corresponding counters of both inputs and grows
// further when the combined value needs it. Throws ConfigMismatch unless both
// sketches share kind, layout, geometry, policy and seed.
Sketch merge_sketches(const Sketch& a, const Sketch& b);

// Sketch of the frequency difference a - b. General for Count Sketch; for
// sum-merge Count-Min the caller guarantees b's stream is contained in a's,
// and a negative counter raises NegativeResult. Conservative update sketches
// are not linear and cannot be subtracted.
Sketch subtract_sketches(const Sketch& a, const Sketch& b);

Sketch combine(const Sketch& a, const Sketch& b, CombineKind kind);

}  // namespace salsa
