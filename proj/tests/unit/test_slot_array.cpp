#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "salsa/error.hpp"
#include "salsa/slot_array.hpp"

using namespace salsa;

namespace {

void set_value(SlotArray& a, CounterRef ref, std::uint64_t v) { a.write_unsigned(ref, v); }

}  // namespace

TEST_CASE("merge bit index") {
  CHECK(SlotArray::merge_bit_index(6, 1) == 6);
  CHECK(SlotArray::merge_bit_index(4, 2) == 5);
  CHECK(SlotArray::merge_bit_index(0, 3) == 3);
}

TEST_CASE("max level is bounded by word size and width") {
  CHECK(SlotArray(8, 1024).max_level() == 3);
  CHECK(SlotArray(2, 1024).max_level() == 5);
  CHECK(SlotArray(8, 4).max_level() == 2);
  CHECK(SlotArray(64, 16).max_level() == 0);
}

TEST_CASE("locate") {
  SlotArray a(8, 16);
  CHECK(a.locate(0) == CounterRef{0, 0});

  set_value(a, {6, 0}, 200);
  set_value(a, {7, 0}, 3);
  const CounterRef pair = a.merge_up({6, 0}, MergePolicy::Sum);
  CHECK(pair == CounterRef{6, 1});
  CHECK(a.merge_bit(6));
  CHECK_FALSE(a.merge_bit(5));
  CHECK(a.locate(6) == CounterRef{6, 1});
  CHECK(a.locate(7) == CounterRef{6, 1});

  a.merge_up(pair, MergePolicy::Sum);
  CHECK(a.merge_bit(4));
  CHECK(a.merge_bit(5));
  CHECK(a.merge_bit(6));
  CHECK_FALSE(a.merge_bit(3));
  CHECK(a.locate(7) == CounterRef{4, 2});
  CHECK(a.locate(4) == CounterRef{4, 2});
  CHECK(a.locate(3) == CounterRef{3, 0});
}

TEST_CASE("slot little endian read") {
  const std::vector<std::uint8_t> bytes{'S', 'L', 'S', 'A', 1, 8, 8, 0, 0, 0, 0, 0, 0, 0, 3,
                                        0x40, 0, 0, 0, 0, 0, 0, 0x03, 0x01};
  const SlotArray a = SlotArray::from_snapshot(bytes, CounterEncoding::Unsigned);
  CHECK(a.locate(7) == CounterRef{6, 1});
  CHECK(a.read_unsigned({6, 1}) == 259);
}

TEST_CASE("write and read round trip") {
  SlotArray a(8, 64);
  a.write_unsigned({3, 0}, 255);
  CHECK(a.read_unsigned({3, 0}) == 255);
  CHECK_THROWS_AS(a.write_unsigned({3, 0}, 256), ValueTooWide);

  a.merge_up({4, 0}, MergePolicy::Sum);
  a.write_unsigned({4, 1}, 65535);
  CHECK(a.read_unsigned({4, 1}) == 65535);
  CHECK(a.read_unsigned({3, 0}) == 255);

  std::mt19937_64 rng(5);
  SlotArray b(8, 64);
  CounterRef ref{8, 0};
  for (int l = 0; l < 3; ++l) ref = b.merge_up(ref, MergePolicy::Sum);
  CHECK(ref == CounterRef{8, 3});
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t v = rng();
    b.write_unsigned(ref, v);
    CHECK(b.read_unsigned(ref) == v);
  }
}

TEST_CASE("merge up policies") {
  SlotArray sum(8, 16);
  SlotArray max(8, 16);
  for (SlotArray* a : {&sum, &max}) {
    set_value(*a, {6, 0}, 200);
    set_value(*a, {7, 0}, 3);
  }
  CHECK(sum.read_unsigned(sum.merge_up({6, 0}, MergePolicy::Sum)) == 203);
  CHECK(max.read_unsigned(max.merge_up({6, 0}, MergePolicy::Max)) == 200);

  SlotArray a(8, 16);
  a.merge_up({6, 0}, MergePolicy::Sum);
  a.write_unsigned({6, 1}, 300);
  a.write_unsigned({4, 0}, 10);
  a.write_unsigned({5, 0}, 20);
  const CounterRef top = a.merge_up({6, 1}, MergePolicy::Sum);
  CHECK(top == CounterRef{4, 2});
  CHECK(a.read_unsigned(top) == 330);
  CHECK(a.merge_bit(4));
  CHECK(a.merge_bit(5));
  CHECK(a.merge_bit(6));
  CHECK_FALSE(a.find_violation().has_value());

  SlotArray odd(8, 16);
  CHECK(odd.merge_up({7, 0}, MergePolicy::Sum) == CounterRef{6, 1});
  CHECK(odd.merge_up({6, 1}, MergePolicy::Sum) == CounterRef{4, 2});

  SlotArray full(8, 4);
  CounterRef r = full.merge_up({0, 0}, MergePolicy::Sum);
  r = full.merge_up(r, MergePolicy::Sum);
  CHECK_THROWS_AS(full.merge_up(r, MergePolicy::Sum), MaxLevelReached);
}

TEST_CASE("add unsigned merges before adding") {
  SlotArray a(8, 16);
  CHECK(a.add_unsigned(3, 5, MergePolicy::Sum) == CounterRef{3, 0});
  CHECK(a.read_unsigned({3, 0}) == 5);

  SlotArray sum(8, 16);
  SlotArray max(8, 16);
  for (SlotArray* x : {&sum, &max}) {
    set_value(*x, {6, 0}, 255);
    set_value(*x, {7, 0}, 3);
  }
  const CounterRef rs = sum.add_unsigned(6, 1, MergePolicy::Sum);
  const CounterRef rm = max.add_unsigned(6, 1, MergePolicy::Max);
  CHECK(rs == CounterRef{6, 1});
  CHECK(sum.read_unsigned(rs) == 259);
  CHECK(rm == CounterRef{6, 1});
  CHECK(max.read_unsigned(rm) == 256);

  SlotArray big(8, 16);
  const CounterRef r = big.add_unsigned(9, std::uint64_t{1} << 40, MergePolicy::Sum);
  CHECK(r == CounterRef{8, 3});
  CHECK(big.read_unsigned(r) == std::uint64_t{1} << 40);
  CHECK(big.peak_level() == 3);
}

TEST_CASE("saturation clamps at the top level") {
  SlotArray a(8, 4);  // tops out at 32 bits
  a.add_unsigned(0, 0xffffffffULL, MergePolicy::Sum);
  CHECK_FALSE(a.saturated());
  const CounterRef r = a.add_unsigned(0, 1, MergePolicy::Sum);
  CHECK(a.saturated());
  CHECK(a.read_unsigned(r) == 0xffffffffULL);

  SlotArray b(8, 16);
  b.add_unsigned(0, ~std::uint64_t{0}, MergePolicy::Sum);
  CHECK_FALSE(b.saturated());
  b.add_unsigned(0, 1, MergePolicy::Sum);
  CHECK(b.saturated());
}

TEST_CASE("raise to") {
  SlotArray a(8, 16);
  a.raise_to(2, 10, MergePolicy::Max);
  CHECK(a.read_unsigned({2, 0}) == 10);
  a.raise_to(2, 4, MergePolicy::Max);
  CHECK(a.read_unsigned({2, 0}) == 10);
  const CounterRef r = a.raise_to(2, 1000, MergePolicy::Max);
  CHECK(r == CounterRef{2, 1});
  CHECK(a.read_unsigned(r) == 1000);
}

TEST_CASE("sign magnitude") {
  SlotArray a(8, 16, CounterEncoding::SignMagnitude);
  a.write_signed({0, 0}, -5);
  CHECK(a.read_signed({0, 0}) == -5);
  CHECK(a.capacity({0, 0}) == 127);
  CHECK_THROWS_AS(a.write_signed({1, 0}, -128), ValueTooWide);
  a.write_signed({1, 0}, -127);
  CHECK(a.read_signed({1, 0}) == -127);

  a.write_signed({4, 0}, 127);
  a.write_signed({5, 0}, -3);
  const CounterRef r = a.add_signed(4, 1);
  CHECK(r == CounterRef{4, 1});
  CHECK(a.read_signed(r) == 125);

  a.write_signed({8, 0}, -127);
  CHECK(a.add_signed(8, -1) == CounterRef{8, 1});
  CHECK(a.read_signed({8, 1}) == -128);

  a.write_signed({10, 0}, 0);
  CHECK(a.read_unsigned({10, 0}) == 0);
  a.write_signed({10, 0}, 7);
  a.add_signed(10, -7);
  CHECK(a.read_unsigned({10, 0}) == 0);
  CHECK_FALSE(a.find_violation().has_value());

  CHECK_THROWS_AS(a.merge_up({12, 0}, MergePolicy::Max), InvalidConfig);
}

TEST_CASE("scale down") {
  SlotArray a(8, 16);
  a.write_unsigned({0, 0}, 7);
  a.write_unsigned({1, 0}, 4);
  a.merge_up({2, 0}, MergePolicy::Sum);
  a.write_unsigned({2, 1}, 300);
  a.scale_down_all(DownsampleMode::Deterministic, 0);
  CHECK(a.read_unsigned({0, 0}) == 3);
  CHECK(a.read_unsigned({1, 0}) == 2);
  CHECK(a.read_unsigned({2, 1}) == 150);
  CHECK(a.locate(3) == CounterRef{2, 1});

  SlotArray zero(8, 16);
  const SlotArray before = zero;
  zero.scale_down_all(DownsampleMode::Probabilistic, 3);
  CHECK(zero == before);

  double total = 0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    SlotArray b(8, 2);
    b.write_unsigned({0, 0}, 10);
    b.scale_down_all(DownsampleMode::Probabilistic, static_cast<std::uint64_t>(seed));
    total += static_cast<double>(b.read_unsigned({0, 0}));
  }
  const double mean = total / trials;
  CHECK(mean >= 4.85);
  CHECK(mean <= 5.15);
}

TEST_CASE("split") {
  SlotArray a(8, 16);
  a.merge_up({4, 0}, MergePolicy::Max);
  a.write_unsigned({4, 1}, 150);
  const auto [l, r] = a.split({4, 1}, MergePolicy::Max);
  CHECK(l == CounterRef{4, 0});
  CHECK(r == CounterRef{5, 0});
  CHECK(a.read_unsigned(l) == 150);
  CHECK(a.read_unsigned(r) == 150);
  CHECK_FALSE(a.merge_bit(4));

  a.merge_up({4, 0}, MergePolicy::Max);
  a.write_unsigned({4, 1}, 300);
  CHECK_THROWS_AS(a.split({4, 1}, MergePolicy::Max), SplitUnrepresentable);
  CHECK_THROWS_AS(a.split({4, 1}, MergePolicy::Sum), SplitNotMaxMerge);

  SlotArray b(8, 16);
  b.merge_to_level(4, 2, MergePolicy::Max);
  b.write_unsigned({4, 2}, 100);
  const auto [bl, br] = b.split({4, 2}, MergePolicy::Max);
  CHECK(bl == CounterRef{4, 1});
  CHECK(br == CounterRef{6, 1});
  CHECK(b.read_unsigned(bl) == 100);
  CHECK(b.read_unsigned(br) == 100);
  CHECK(b.locate(7) == CounterRef{6, 1});
  CHECK_FALSE(b.find_violation().has_value());
}

TEST_CASE("memory footprint") {
  CHECK(SlotArray(8, 1024).memory_bits() == 1024 * 8 + 1024);
  CHECK(SlotArray(16, 64).memory_bits() == 64 * 16 + 64);
}

TEST_CASE("snapshot golden bytes") {
  SlotArray a(8, 8);
  a.write_unsigned({0, 0}, 0x11);
  a.merge_up({6, 0}, MergePolicy::Sum);
  a.write_unsigned({6, 1}, 259);
  const std::vector<std::uint8_t> expected{
      'S', 'L', 'S', 'A', 1, 8,                     // magic, version, s
      8, 0, 0, 0, 0, 0, 0, 0,                       // w
      3,                                            // max level
      0x40,                                         // merge bit 6
      0x11, 0, 0, 0, 0, 0, 0x03, 0x01};             // slots
  CHECK(a.snapshot() == expected);
  CHECK(SlotArray::from_snapshot(expected, CounterEncoding::Unsigned) == a);
}

TEST_CASE("snapshot rejects malformed input") {
  SlotArray a(8, 8);
  auto bytes = a.snapshot();
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(SlotArray::from_snapshot(bad_magic, CounterEncoding::Unsigned), SnapshotError);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(SlotArray::from_snapshot(truncated, CounterEncoding::Unsigned), SnapshotError);
  auto broken = bytes;
  broken[15] = 0x20;  // merge bit 5 without its children
  CHECK_THROWS_AS(SlotArray::from_snapshot(broken, CounterEncoding::Unsigned), SnapshotError);
}

TEST_CASE("randomized operations match the reference model") {
  for (const unsigned s : {2U, 4U, 8U}) {
    for (const bool sum : {true, false}) {
      const std::size_t w = 64;
      SlotArray a(s, w);
      oracle::CounterModel model(s, w, a.max_level());
      std::mt19937_64 rng(s * 7 + (sum ? 1 : 0));
      const MergePolicy policy = sum ? MergePolicy::Sum : MergePolicy::Max;
      std::uint64_t added = 0;
      for (int op = 0; op < 3000; ++op) {
        const std::size_t j = rng() % w;
        const unsigned r = static_cast<unsigned>(rng() % 10);
        if (r < 8) {
          const std::uint64_t v = rng() % (std::uint64_t{1} << (rng() % 12));
          const bool ok = model.add(j, v, sum);
          a.add_unsigned(j, v, policy);
          CHECK(a.saturated() == !ok);
          added += v;
        } else if (!sum && model.level(j) > 0 && model.value(j) <= model.capacity(model.level(j) - 1)) {
          const CounterRef ref = a.locate(j);
          a.split(ref, MergePolicy::Max);
          model.split(j);
        }
        for (std::size_t k = 0; k < w; ++k) {
          const CounterRef ref = a.locate(k);
          REQUIRE(ref.level == model.level(k));
          REQUIRE(a.read_unsigned(ref) == model.value(k));
        }
        REQUIRE_FALSE(a.find_violation().has_value());
      }
      if (sum && !a.saturated()) {
        std::uint64_t total = 0;
        a.for_each_counter([&](CounterRef ref) { total += a.read_unsigned(ref); });
        CHECK(total == added);
      }
    }
  }
}

TEST_CASE("max merge is dominated by sum merge") {
  SlotArray sum(8, 32);
  SlotArray max(8, 32);
  std::mt19937_64 rng(11);
  for (int op = 0; op < 5000; ++op) {
    const std::size_t j = rng() % 32;
    const std::uint64_t v = rng() % 64;
    sum.add_unsigned(j, v, MergePolicy::Sum);
    max.add_unsigned(j, v, MergePolicy::Max);
    for (std::size_t k = 0; k < 32; ++k) {
      REQUIRE(max.read_unsigned(max.locate(k)) <= sum.read_unsigned(sum.locate(k)));
    }
  }
}
