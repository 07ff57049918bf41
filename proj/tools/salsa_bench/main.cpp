#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bench.hpp"
#include "salsa/error.hpp"
#include "salsa/workload.hpp"

namespace {

using salsa::bench::UsageError;

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
  return parts;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + " '" + text + "'");
  }
}

// "N" means seeds 0..N-1; a comma list names the seeds explicitly.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  const auto parts = split(text, ',');
  std::vector<std::uint64_t> seeds;
  if (parts.size() == 1) {
    const std::uint64_t n = parse_u64(parts[0], "seed count");
    if (n == 0) throw UsageError("--seeds needs at least one seed");
    for (std::uint64_t i = 0; i < n; ++i) seeds.push_back(i);
    return seeds;
  }
  for (const auto& p : parts) seeds.push_back(parse_u64(p, "seed"));
  return seeds;
}

salsa::ZipfSpec parse_zipf(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw UsageError("--zipf expects SKEW,UNIVERSE,LENGTH");
  salsa::ZipfSpec z;
  try {
    std::size_t used = 0;
    z.skew = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
  } catch (const std::exception&) {
    throw UsageError("invalid zipf skew '" + parts[0] + "'");
  }
  z.universe = parse_u64(parts[1], "zipf universe");
  z.length = parse_u64(parts[2], "zipf length");
  return z;
}

struct RunFlags {
  std::string sketch = "cms";
  std::string layout = "salsa";
  std::string policy;
  unsigned bits = 32;
  unsigned s = 8;
  unsigned d = 0;
  std::string memory;
  std::string trace;
  std::string zipf;
  std::string seeds = "1";
  std::vector<std::string> tasks;
  bool aee = false;
  double delta = 0.001;
  unsigned forced_downsamples = 0;
  std::size_t k = 64;
  double phi = 0.001;
  std::string format = "csv";
  std::string out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--sketch", f.sketch, "cms, cus or cs")->check(CLI::IsMember({"cms", "cus", "cs"}));
  cmd->add_option("--layout", f.layout, "baseline or salsa")->check(CLI::IsMember({"baseline", "salsa"}));
  cmd->add_option("--policy", f.policy, "merge policy for salsa rows")->check(CLI::IsMember({"sum", "max"}));
  cmd->add_option("--bits", f.bits, "baseline counter width");
  cmd->add_option("--s", f.s, "salsa slot width");
  cmd->add_option("--d", f.d, "rows");
  cmd->add_option("--memory", f.memory, "budgets in bytes, comma separated")->required();
  auto* trace = cmd->add_option("--trace", f.trace, "trace file (.csv or binary)");
  auto* zipf = cmd->add_option("--zipf", f.zipf, "SKEW,UNIVERSE,LENGTH");
  trace->excludes(zipf);
  cmd->add_option("--seeds", f.seeds, "seed count or comma separated list");
  cmd->add_option("--task", f.tasks, "on_arrival, top_k, heavy_hitters, change_detection, count_distinct")
      ->check(CLI::IsMember(salsa::bench::known_tasks()));
  cmd->add_flag("--aee", f.aee, "sample updates and downsample on overflow");
  cmd->add_option("--delta", f.delta, "failure probability for --aee");
  cmd->add_option("--forced-downsamples", f.forced_downsamples, "overflows resolved by downsampling first");
  cmd->add_option("--k", f.k, "top_k size");
  cmd->add_option("--phi", f.phi, "heavy hitter threshold fraction");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", f.out, "output path (stdout when absent)");
}

salsa::bench::RunSpec to_spec(const RunFlags& f) {
  salsa::bench::RunSpec spec;
  spec.kind = f.sketch == "cms"   ? salsa::SketchKind::CountMin
              : f.sketch == "cus" ? salsa::SketchKind::ConservativeUpdate
                                  : salsa::SketchKind::CountSketch;
  spec.layout = f.layout == "salsa" ? salsa::Layout::Salsa : salsa::Layout::Baseline;
  if (!f.policy.empty()) spec.policy = f.policy == "max" ? salsa::MergePolicy::Max : salsa::MergePolicy::Sum;
  spec.bits = f.bits;
  spec.s = f.s;
  if (f.d != 0) spec.rows = f.d;
  for (const auto& b : split(f.memory, ',')) spec.budgets.push_back(parse_u64(b, "memory budget"));
  if (!f.trace.empty()) spec.trace_path = f.trace;
  if (!f.zipf.empty()) spec.zipf = parse_zipf(f.zipf);
  spec.seeds = parse_seeds(f.seeds);
  if (!f.tasks.empty()) spec.tasks = f.tasks;
  spec.aee = f.aee;
  spec.delta = f.delta;
  spec.forced_downsamples = f.forced_downsamples;
  spec.top_k = f.k;
  spec.phi = f.phi;
  return spec;
}

void emit(const RunFlags& f, const std::vector<salsa::bench::Row>& rows) {
  const auto format = f.format == "json" ? salsa::bench::OutputFormat::Json : salsa::bench::OutputFormat::Csv;
  if (f.out.empty()) {
    salsa::bench::write_rows(std::cout, rows, format);
    return;
  }
  std::ofstream out(f.out, std::ios::binary | std::ios::trunc);
  if (!out) throw salsa::IoError("cannot open " + f.out + " for writing");
  salsa::bench::write_rows(out, rows, format);
  if (!out) throw salsa::IoError("write to " + f.out + " failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SALSA sketch benchmark harness"};
  app.require_subcommand(1);

  double skew = 1.0;
  std::uint64_t universe = 100000;
  std::uint64_t length = 1000000;
  std::uint64_t seed = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a Zipf trace");
  generate->add_option("--skew", skew, "Zipf exponent");
  generate->add_option("--universe", universe, "number of distinct ranks");
  generate->add_option("--length", length, "number of updates");
  generate->add_option("--seed", seed, "generator seed");
  generate->add_option("--out", gen_out, "output path; .csv selects CSV")->required();

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run tasks for one or more memory budgets");
  add_run_flags(run, run_flags);
  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run tasks across a list of memory budgets");
  add_run_flags(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (generate->parsed()) {
      if (!(skew > 0.0)) throw UsageError("--skew must be positive");
      if (universe == 0) throw UsageError("--universe must be positive");
      const auto trace = salsa::generate_zipf({skew, universe, length, seed});
      salsa::write_trace(gen_out, salsa::format_for_path(gen_out), trace);
      return 0;
    }
    const RunFlags& flags = run->parsed() ? run_flags : sweep_flags;
    const auto rows = salsa::bench::run(to_spec(flags), std::cerr);
    emit(flags, rows);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const salsa::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
