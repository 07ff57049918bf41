#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "salsa/count_distinct.hpp"
#include "salsa/error.hpp"
#include "salsa/sketch.hpp"
#include "salsa/workload.hpp"

using namespace salsa;

TEST_CASE("empty rows estimate zero") {
  CHECK(count_distinct(SlotArray(8, 64)) == 0);
  CHECK(count_distinct(FixedRow(32, 64)) == 0);
}

TEST_CASE("linear counting formula") {
  CHECK(linear_counting(32, 64) == doctest::Approx(std::log(0.5) / std::log(1 - 1.0 / 64)));
  CHECK_THROWS_AS(linear_counting(0, 64), AllSlotsOccupied);
}

TEST_CASE("without merges salsa matches vanilla linear counting") {
  const auto trace = generate_zipf({0.8, 100000, 300, 2});
  Sketch s(SketchConfig::salsa(SketchKind::CountMin, 1024, 5));
  Sketch b(SketchConfig::baseline(SketchKind::CountMin, 1024, 5));
  for (const auto& u : trace) {
    s.update(u.item, u.value);
    b.update(u.item, u.value);
  }
  REQUIRE(s.max_level() == 0);
  CHECK(count_distinct(s.salsa_rows()[0]) == count_distinct(b.baseline_rows()[0]));
}

TEST_CASE("merged counters contribute the zero fraction") {
  SlotArray row(8, 8);
  row.write_unsigned({0, 0}, 1);
  row.write_unsigned({1, 0}, 1);
  row.write_unsigned({2, 0}, 1);
  row.merge_up({6, 0}, MergePolicy::Sum);
  row.write_unsigned({6, 1}, 300);
  // unmerged: slots 0..5, three of them zero, so f = 0.5; one level-1 counter hides one slot
  const double zeros = 3 + 0.5;
  CHECK(count_distinct(row) == doctest::Approx(std::log(zeros / 8) / std::log(1 - 1.0 / 8)));
}

TEST_CASE("all slots occupied") {
  SlotArray row(8, 4);
  for (std::size_t j = 0; j < 4; ++j) row.write_unsigned({j, 0}, 1);
  CHECK_THROWS_AS(count_distinct(row), AllSlotsOccupied);
}
