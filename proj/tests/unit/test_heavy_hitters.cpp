#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "salsa/error.hpp"
#include "salsa/heavy_hitters.hpp"

using namespace salsa;

TEST_CASE("keeps the largest estimates") {
  HeavyHitterTracker t(3);
  t.offer(1, 5);
  t.offer(2, 1);
  t.offer(3, 9);
  t.offer(4, 2);
  CHECK(t.size() == 3);
  CHECK_FALSE(t.contains(2));
  const auto r = t.report();
  REQUIRE(r.size() == 3);
  CHECK(r[0] == HeavyHitter{3, 9});
  CHECK(r[1] == HeavyHitter{1, 5});
  CHECK(r[2] == HeavyHitter{4, 2});
  CHECK(t.minimum()->item == 4);
}

TEST_CASE("reoffered items are refreshed") {
  HeavyHitterTracker t(2);
  t.offer(1, 1);
  t.offer(2, 2);
  t.offer(1, 10);
  CHECK(t.report()[0] == HeavyHitter{1, 10});
  CHECK(t.size() == 2);
}

TEST_CASE("ties go to the lower item id") {
  HeavyHitterTracker t(2);
  t.offer(5, 3);
  t.offer(9, 3);
  t.offer(2, 3);
  CHECK(t.contains(2));
  CHECK(t.contains(5));
  CHECK_FALSE(t.contains(9));
  t.offer(7, 3);
  CHECK_FALSE(t.contains(7));
  const auto r = t.report();
  CHECK(r[0].item == 2);
  CHECK(r[1].item == 5);
}

TEST_CASE("threshold and capacity") {
  HeavyHitterTracker t = HeavyHitterTracker::for_epsilon(0.3);
  CHECK(t.capacity() == 4);
  t.offer(1, 10);
  t.offer(2, 5);
  t.offer(3, 1);
  CHECK(t.report(5.0).size() == 2);
  CHECK_THROWS_AS(HeavyHitterTracker(0), InvalidConfig);
}

TEST_CASE("matches an exhaustive recompute with monotone estimates") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    HeavyHitterTracker t(5);
    std::map<std::uint64_t, double> est;
    for (int i = 0; i < 300; ++i) {
      const std::uint64_t x = rng() % 30;
      est[x] += 1;
      t.offer(x, est[x]);
    }
    std::vector<std::pair<double, std::uint64_t>> all;
    for (const auto& [x, e] : est) all.emplace_back(-e, x);
    std::sort(all.begin(), all.end());
    const auto r = t.report();
    REQUIRE(r.size() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(r[i].estimate == -all[i].first);
    }
  }
}
