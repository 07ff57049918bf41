#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "salsa/aee.hpp"
#include "salsa/count_distinct.hpp"
#include "salsa/error.hpp"
#include "salsa/metrics.hpp"
#include "salsa/tasks.hpp"

namespace salsa::bench {

namespace {

struct Metric {
  std::string name;
  double value;
};

std::string layout_label(const RunSpec& spec) {
  std::string label = to_string(spec.layout);
  return spec.aee ? label + "-aee" : label;
}

template <typename S>
std::vector<Metric> on_arrival(S& sketch, const std::vector<Update>& trace) {
  ExactOracle oracle;
  const ErrorSeries series = on_arrival_run(sketch, std::span<const Update>(trace), oracle);
  const Estimator estimate = [&](std::uint64_t x) { return static_cast<double>(sketch.query(x)); };
  std::vector<Metric> out{{"nrmse", nrmse(series)}};
  if (!oracle.empty()) {
    out.push_back({"aae", aae(estimate, oracle)});
    out.push_back({"are", are(estimate, oracle)});
  }
  return out;
}

template <typename S>
std::vector<Metric> top_k(S& sketch, const std::vector<Update>& trace, std::size_t k) {
  HeavyHitterTracker tracker(k);
  const auto reported = track_heavy_hitters(tracker, sketch, std::span<const Update>(trace));
  ExactOracle oracle;
  for (const Update& u : trace) oracle.apply(u);
  return {{"recall", top_k_recall(reported, oracle, k)}};
}

template <typename S>
std::vector<Metric> heavy_hitters(S& sketch, const std::vector<Update>& trace, double phi) {
  HeavyHitterTracker tracker = HeavyHitterTracker::for_epsilon(phi);
  ExactOracle oracle;
  for (const Update& u : trace) oracle.apply(u);
  const double threshold = phi * static_cast<double>(oracle.volume());
  const auto reported = track_heavy_hitters(tracker, sketch, std::span<const Update>(trace), threshold);

  std::set<std::uint64_t> truth;
  for (const auto& [item, f] : oracle.frequencies()) {
    if (static_cast<double>(f) >= threshold) truth.insert(item);
  }
  std::size_t correct = 0;
  for (const HeavyHitter& h : reported) correct += truth.count(h.item);
  std::vector<Metric> out{{"reported", static_cast<double>(reported.size())},
                          {"true_heavy", static_cast<double>(truth.size())}};
  if (!reported.empty()) out.push_back({"precision", static_cast<double>(correct) / static_cast<double>(reported.size())});
  if (!truth.empty()) out.push_back({"recall", static_cast<double>(correct) / static_cast<double>(truth.size())});
  return out;
}

std::vector<Metric> count_distinct_task(const SketchConfig& config, const std::vector<Update>& trace,
                                        std::ostream& log) {
  if (config.kind == SketchKind::CountSketch) throw UsageError("count_distinct needs --sketch cms or cus");
  Sketch sketch(config);
  ExactOracle oracle;
  for (const Update& u : trace) {
    sketch.update(u.item, u.value);
    oracle.apply(u);
  }
  double estimate = 0.0;
  try {
    estimate = sketch.is_salsa() ? count_distinct(sketch.salsa_rows()[0]) : count_distinct(sketch.baseline_rows()[0]);
  } catch (const AllSlotsOccupied&) {
    log << "warning: count_distinct skipped for w=" << config.width << " seed=" << config.seed
        << ": every slot is occupied\n";
    return {};
  }
  const double truth = static_cast<double>(oracle.distinct_count());
  std::vector<Metric> out{{"estimate", estimate}, {"distinct", truth}};
  if (truth > 0) out.push_back({"relative_error", std::fabs(estimate - truth) / truth});
  return out;
}

std::vector<Metric> run_task(const RunSpec& spec, const SketchConfig& config, const std::string& task,
                             const std::vector<Update>& trace, std::ostream& log) {
  if (task == "change_detection") {
    if (spec.aee) throw UsageError("change_detection does not support --aee");
    const auto [a, b] = split_halves(trace);
    const ChangeDetection cd = change_detection(a, b, config);
    return {{"nrmse", nrmse(cd.errors)}};
  }
  if (task == "count_distinct") {
    if (spec.aee) throw UsageError("count_distinct does not support --aee");
    return count_distinct_task(config, trace, log);
  }

  auto dispatch = [&](auto& sketch) -> std::vector<Metric> {
    if (task == "on_arrival") return on_arrival(sketch, trace);
    if (task == "top_k") return top_k(sketch, trace, spec.top_k);
    return heavy_hitters(sketch, trace, spec.phi);
  };
  if (spec.aee) {
    AeeParams params;
    params.delta = spec.delta;
    params.forced_downsamples = spec.forced_downsamples;
    AeeSketch sketch(config, params);
    return dispatch(sketch);
  }
  Sketch sketch(config);
  return dispatch(sketch);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks{"change_detection", "count_distinct", "heavy_hitters",
                                              "on_arrival", "top_k"};
  return tasks;
}

std::uint64_t footprint_bytes(const SketchConfig& config) { return (config.memory_bits() + 7) / 8; }

SketchConfig config_for_budget(const RunSpec& spec, std::uint64_t budget_bytes, std::uint64_t seed) {
  SketchConfig c = spec.layout == Layout::Salsa ? SketchConfig::salsa(spec.kind, 2, seed, spec.s)
                                                : SketchConfig::baseline(spec.kind, 2, seed, spec.bits);
  if (spec.policy) c.policy = *spec.policy;
  if (spec.rows) c.rows = *spec.rows;
  if (footprint_bytes(c) > budget_bytes) {
    throw UsageError("memory budget of " + std::to_string(budget_bytes) + " bytes is too small for this sketch");
  }
  while (c.width <= (std::size_t{1} << 40)) {
    SketchConfig wider = c;
    wider.width *= 2;
    if (footprint_bytes(wider) > budget_bytes) break;
    c = wider;
  }
  try {
    c.validate();
  } catch (const InvalidConfig& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::vector<Row> run(RunSpec spec, std::ostream& log) {
  if (spec.budgets.empty()) throw UsageError("at least one --memory budget is required");
  if (spec.trace_path.has_value() == spec.zipf.has_value()) throw UsageError("exactly one of --trace and --zipf is required");
  if (spec.seeds.empty()) throw UsageError("at least one seed is required");
  if (spec.aee && spec.kind == SketchKind::CountSketch) throw UsageError("--aee needs --sketch cms or cus");
  for (const std::string& t : spec.tasks) {
    if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end()) {
      throw UsageError("unknown task '" + t + "'");
    }
  }

  std::sort(spec.budgets.begin(), spec.budgets.end());
  if (const auto dup = std::unique(spec.budgets.begin(), spec.budgets.end()); dup != spec.budgets.end()) {
    log << "warning: duplicate memory budgets ignored\n";
    spec.budgets.erase(dup, spec.budgets.end());
  }
  std::sort(spec.seeds.begin(), spec.seeds.end());
  spec.seeds.erase(std::unique(spec.seeds.begin(), spec.seeds.end()), spec.seeds.end());
  std::sort(spec.tasks.begin(), spec.tasks.end());
  spec.tasks.erase(std::unique(spec.tasks.begin(), spec.tasks.end()), spec.tasks.end());

  std::vector<Update> file_trace;
  if (spec.trace_path) file_trace = read_trace(*spec.trace_path, format_for_path(*spec.trace_path));

  std::vector<Row> rows;
  bool warned_empty = false;
  for (const std::uint64_t budget : spec.budgets) {
    const SketchConfig shape = config_for_budget(spec, budget, 0);
    Row base;
    base.sketch_kind = to_string(shape.kind);
    base.layout = layout_label(spec);
    base.policy = shape.layout == Layout::Salsa ? to_string(shape.policy) : "none";
    base.s = shape.counter_bits;
    base.d = shape.rows;
    base.w = shape.width;
    base.memory_bytes = footprint_bytes(shape);

    // (task, metric) -> per-seed values, in first-seen metric order
    std::vector<std::pair<std::string, std::string>> groups;
    std::map<std::pair<std::string, std::string>, std::vector<double>> values;

    for (const std::uint64_t seed : spec.seeds) {
      std::vector<Update> generated;
      if (spec.zipf) {
        ZipfSpec z = *spec.zipf;
        z.seed = seed;
        generated = generate_zipf(z);
      }
      const std::vector<Update>& trace = spec.zipf ? generated : file_trace;
      if (trace.empty()) {
        if (!warned_empty) log << "warning: empty trace, no metrics reported\n";
        warned_empty = true;
        continue;
      }
      const SketchConfig config = config_for_budget(spec, budget, seed);
      for (const std::string& task : spec.tasks) {
        for (const Metric& m : run_task(spec, config, task, trace, log)) {
          Row r = base;
          r.seed = std::to_string(seed);
          r.task = task;
          r.metric = m.name;
          r.value = m.value;
          rows.push_back(r);
          const auto key = std::make_pair(task, m.name);
          if (!values.count(key)) groups.push_back(key);
          values[key].push_back(m.value);
        }
      }
    }

    for (const auto& key : groups) {
      const std::vector<double>& v = values[key];
      const double n = static_cast<double>(v.size());
      double mean = 0.0;
      for (const double x : v) mean += x;
      mean /= n;
      Row r = base;
      r.task = key.first;
      r.metric = key.second;
      r.seed = "mean";
      r.value = mean;
      rows.push_back(r);
      if (v.size() < 2) continue;
      double ss = 0.0;
      for (const double x : v) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / (n - 1));
      const boost::math::students_t dist(n - 1);
      const double half = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
      r.seed = "ci95_low";
      r.value = mean - half;
      rows.push_back(r);
      r.seed = "ci95_high";
      r.value = mean + half;
      rows.push_back(r);
    }
  }
  return rows;
}

void write_rows(std::ostream& out, const std::vector<Row>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << "sketch_kind,layout,policy,s,d,w,memory_bytes,seed,task,metric,value\n";
    for (const Row& r : rows) {
      out << r.sketch_kind << ',' << r.layout << ',' << r.policy << ',' << r.s << ',' << r.d << ',' << r.w << ','
          << r.memory_bytes << ',' << r.seed << ',' << r.task << ',' << r.metric << ',' << format_double(r.value)
          << '\n';
    }
    return;
  }
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const Row& r : rows) {
    array.push_back({{"sketch_kind", r.sketch_kind},
                     {"layout", r.layout},
                     {"policy", r.policy},
                     {"s", r.s},
                     {"d", r.d},
                     {"w", r.w},
                     {"memory_bytes", r.memory_bytes},
                     {"seed", r.seed},
                     {"task", r.task},
                     {"metric", r.metric},
                     {"value", r.value}});
  }
  out << array.dump(2) << '\n';
}

}  // namespace salsa::bench
