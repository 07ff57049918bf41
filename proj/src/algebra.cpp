#include "salsa/algebra.hpp"

#include <algorithm>

#include "salsa/error.hpp"

namespace salsa {

namespace {

// Combined value of the counters of `row` tiling [begin, end).
std::uint64_t resolve_range_unsigned(const SlotArray& row, std::size_t begin, std::size_t end,
                                     MergePolicy policy) {
  std::uint64_t acc = 0;
  for (std::size_t j = begin; j < end;) {
    const CounterRef ref = row.locate(j);
    const std::uint64_t v = row.read_unsigned(ref);
    acc = policy == MergePolicy::Sum ? acc + v : std::max(acc, v);
    j += ref.span();
  }
  return acc;
}

std::int64_t resolve_range_signed(const SlotArray& row, std::size_t begin, std::size_t end) {
  std::int64_t acc = 0;
  for (std::size_t j = begin; j < end;) {
    const CounterRef ref = row.locate(j);
    acc += row.read_signed(ref);
    j += ref.span();
  }
  return acc;
}

// Walks the row left to right in segments. Each segment ends at the boundary
// of the coarsest of the three layouts at its start, so both inputs tile it
// exactly. Growth triggered by adding a segment may coarsen the output past
// the segment; the next iteration picks that up through out.locate().
void combine_salsa_rows(const SlotArray& a, const SlotArray& b, SlotArray& out, CombineKind kind,
                        MergePolicy policy) {
  const bool is_signed = out.encoding() == CounterEncoding::SignMagnitude;
  for (std::size_t j = 0; j < out.width();) {
    const unsigned level = std::max({a.locate(j).level, b.locate(j).level, out.locate(j).level});
    const std::size_t end = ((j >> level) << level) + (std::size_t{1} << level);

    out.merge_to_level(j, level, policy);
    if (is_signed) {
      const std::int64_t va = resolve_range_signed(a, j, end);
      const std::int64_t vb = resolve_range_signed(b, j, end);
      out.add_signed(j, kind == CombineKind::Merge ? va + vb : va - vb);
    } else {
      const std::uint64_t va = resolve_range_unsigned(a, j, end, policy);
      const std::uint64_t vb = resolve_range_unsigned(b, j, end, policy);
      if (kind == CombineKind::Subtract && vb > va) {
        throw NegativeResult("subtraction produced a negative counter; containment violated");
      }
      const std::uint64_t sum = va > ~std::uint64_t{0} - vb ? ~std::uint64_t{0} : va + vb;
      out.add_unsigned(j, kind == CombineKind::Merge ? sum : va - vb, policy);
    }
    j = end;
  }
}

void combine_baseline_rows(const FixedRow& a, const FixedRow& b, FixedRow& out, CombineKind kind) {
  const bool is_signed = out.encoding() == CounterEncoding::SignMagnitude;
  for (std::size_t j = 0; j < out.width(); ++j) {
    if (is_signed) {
      const std::int64_t vb = b.read_signed(j);
      out.add_signed(j, a.read_signed(j));
      out.add_signed(j, kind == CombineKind::Merge ? vb : -vb);
    } else {
      const std::uint64_t va = a.read_unsigned(j);
      const std::uint64_t vb = b.read_unsigned(j);
      if (kind == CombineKind::Merge) {
        out.add_unsigned(j, va);
        out.add_unsigned(j, vb);
      } else {
        if (vb > va) throw NegativeResult("subtraction produced a negative counter; containment violated");
        out.write_unsigned(j, va - vb);
      }
    }
  }
}

}  // namespace

Sketch combine(const Sketch& a, const Sketch& b, CombineKind kind) {
  const SketchConfig& config = a.config();
  if (!(config == b.config())) throw ConfigMismatch("sketches differ in configuration or seed");
  if (kind == CombineKind::Subtract) {
    if (config.kind == SketchKind::ConservativeUpdate) {
      throw InvalidConfig("conservative update sketches cannot be subtracted");
    }
    if (config.kind == SketchKind::CountMin && a.is_salsa() && config.policy != MergePolicy::Sum) {
      throw InvalidConfig("count-min subtraction requires sum-merge");
    }
  }

  Sketch out(config);
  for (unsigned i = 0; i < config.rows; ++i) {
    if (a.is_salsa()) {
      combine_salsa_rows(a.salsa_rows()[i], b.salsa_rows()[i], out.salsa_rows()[i], kind, config.policy);
    } else {
      combine_baseline_rows(a.baseline_rows()[i], b.baseline_rows()[i], out.baseline_rows()[i], kind);
    }
  }
  return out;
}

Sketch merge_sketches(const Sketch& a, const Sketch& b) { return combine(a, b, CombineKind::Merge); }

Sketch subtract_sketches(const Sketch& a, const Sketch& b) { return combine(a, b, CombineKind::Subtract); }

}  // namespace salsa
