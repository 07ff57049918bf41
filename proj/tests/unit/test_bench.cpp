#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "bench.hpp"
#include "salsa/workload.hpp"

using namespace salsa;
using namespace salsa::bench;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("salsa_bench_" + name)).string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SALSA_BENCH_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunSpec small_spec() {
  RunSpec spec;
  spec.zipf = ZipfSpec{1.0, 5000, 20000, 0};
  spec.budgets = {4096};
  spec.seeds = {1, 2, 3};
  return spec;
}

}  // namespace

TEST_CASE("budget to width") {
  RunSpec spec;
  spec.layout = Layout::Salsa;
  const SketchConfig c = config_for_budget(spec, 65536, 0);
  CHECK(c.width == 8192);
  CHECK(footprint_bytes(c) == 4 * (8192 + 8192 / 8));
  spec.layout = Layout::Baseline;
  CHECK(config_for_budget(spec, 65536, 0).width == 4096);
  CHECK(footprint_bytes(config_for_budget(spec, 65536, 0)) == 65536);
  CHECK_THROWS_AS(config_for_budget(spec, 10, 0), UsageError);
}

TEST_CASE("run emits per seed and summary rows") {
  std::ostringstream log;
  const auto rows = run(small_spec(), log);
  int per_seed = 0;
  int summary = 0;
  for (const auto& r : rows) {
    CHECK(r.task == "on_arrival");
    CHECK(r.memory_bytes <= 4096);
    (r.seed == "mean" || r.seed == "ci95_low" || r.seed == "ci95_high" ? summary : per_seed)++;
  }
  CHECK(per_seed == 9);
  CHECK(summary == 9);
}

TEST_CASE("output is deterministic") {
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream log;
  write_rows(a, run(small_spec(), log), OutputFormat::Csv);
  write_rows(b, run(small_spec(), log), OutputFormat::Csv);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("sketch_kind,layout,policy,s,d,w,memory_bytes,seed,task,metric,value\n", 0) == 0);

  std::ostringstream j;
  write_rows(j, run(small_spec(), log), OutputFormat::Json);
  CHECK(j.str().find("\"metric\": \"nrmse\"") != std::string::npos);
}

TEST_CASE("empty traces and duplicate budgets") {
  RunSpec spec = small_spec();
  spec.zipf->length = 0;
  std::ostringstream log;
  CHECK(run(spec, log).empty());
  CHECK(log.str().find("warning") != std::string::npos);

  RunSpec dup = small_spec();
  dup.budgets = {4096, 2048, 4096};
  std::ostringstream log2;
  const auto rows = run(dup, log2);
  CHECK(log2.str().find("duplicate") != std::string::npos);
  std::set<std::uint64_t> widths;
  for (const auto& r : rows) widths.insert(r.w);
  CHECK(widths.size() == 2);

  RunSpec none = small_spec();
  none.budgets.clear();
  CHECK_THROWS_AS(run(none, log), UsageError);
}

TEST_CASE("all tasks run") {
  RunSpec spec = small_spec();
  spec.kind = SketchKind::CountSketch;
  spec.tasks = {"change_detection", "top_k", "on_arrival"};
  std::ostringstream log;
  std::set<std::string> tasks;
  for (const auto& r : run(spec, log)) tasks.insert(r.task);
  CHECK(tasks.size() == 3);

  RunSpec cms = small_spec();
  cms.tasks = {"count_distinct", "heavy_hitters"};
  std::set<std::string> metrics;
  for (const auto& r : run(cms, log)) metrics.insert(r.metric);
  CHECK(metrics.count("estimate"));
  CHECK(metrics.count("recall"));

  RunSpec aee = small_spec();
  aee.aee = true;
  aee.budgets = {300};
  CHECK_FALSE(run(aee, log).empty());
}

TEST_CASE("command line") {
  const std::string z = temp_path("z.bin");
  const std::string z2 = temp_path("z2.bin");
  CHECK(run_cli("generate --skew 1.0 --universe 100000 --length 1000000 --seed 7 --out " + z) == 0);
  CHECK(std::filesystem::file_size(z) == 16000000);
  CHECK(run_cli("generate --skew 1.0 --universe 100000 --length 1000000 --seed 7 --out " + z2) == 0);
  CHECK(slurp(z) == slurp(z2));
  CHECK(run_cli("generate --length 0 --out " + z2) == 0);
  CHECK(std::filesystem::file_size(z2) == 0);

  const std::string out = temp_path("out.csv");
  CHECK(run_cli("run --trace " + z2 + " --memory 4096 --out " + out) == 0);
  CHECK(run_cli("sweep --zipf 1.0,1000,5000 --memory 1024,2048,4096 --seeds 2 --out " + out) == 0);
  const std::string table = slurp(out);
  CHECK(table.find(",1024,") == std::string::npos);  // memory_bytes is the used footprint
  CHECK(run_cli("sweep --zipf 1.0,1000,5000 --memory , --out " + out) == 2);
  CHECK(run_cli("run --zipf 1.0,1000,5000") == 2);
  CHECK(run_cli("run --sketch nope --zipf 1.0,1000,5000 --memory 4096") == 2);
  CHECK(run_cli("run --trace /nonexistent/trace.bin --memory 4096") == 3);
  CHECK(run_cli("run --sketch cs --d 4 --zipf 1.0,1000,5000 --memory 4096") == 2);

  for (const auto& p : {z, z2, out}) std::filesystem::remove(p);
}
