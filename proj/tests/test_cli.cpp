#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

// Set by ctest to the built binary; running the test executable by hand
// without it skips this suite.
const char* coxbench_bin() { return std::getenv("COXBENCH_BIN"); }

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coxsvrg_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + coxbench_bin() + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int st = std::system(cmd.c_str());
#ifdef _WIN32
  return st;
#else
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
#endif
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate, race, plot, and assess chain together") {
  if (!coxbench_bin()) {
    MESSAGE("COXBENCH_BIN not set; skipping CLI checks");
    return;
  }
  const fs::path dir = fresh_dir("pipeline");
  const fs::path log = dir / "log.txt";

  // 1. Simulate a small named dataset.
  write_json(dir / "sim.json", {{"n_obs", 70},
                                {"dims", 4},
                                {"seed", 7},
                                {"target_censoring", 0.3},
                                {"name", "tiny"}});
  int rc = run_cli("simulate --config \"" + (dir / "sim.json").string() + "\" --out \"" +
                       dir.string() + "\"",
                   log);
  INFO("simulate log:\n", slurp(log));
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(dir / "tiny.csv"));
  REQUIRE(fs::exists(dir / "tiny.meta.json"));

  // 2. Race two solvers on that dataset.
  const fs::path race_dir = dir / "race";
  write_json(dir / "race.json",
             {{"dataset", (dir / "tiny.csv").generic_string()},
              {"penalty", {{"preset", "low_ridge"}}},
              {"budget", 200000},
              {"record_wall_time", false},
              {"output_dir", race_dir.generic_string()},
              {"solvers",
               {{{"name", "exact"}, {"algorithm", "fista"}, {"tol", 1e-7}},
                {{"name", "chain"},
                 {"algorithm", "two_svrg"},
                 {"phases", 4},
                 {"gamma", 0.05},
                 {"estimator", "nis"}}}}});
  rc = run_cli("race --config \"" + (dir / "race.json").string() + "\"", log);
  INFO("race log:\n", slurp(log));
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(race_dir / "race_summary.json"));
  REQUIRE(fs::exists(race_dir / "trace_exact_s0.csv"));
  REQUIRE(fs::exists(race_dir / "trace_chain_s0.csv"));
  CHECK(fs::exists(race_dir / "status_exact_s0.json"));
  CHECK(slurp(log).find("error") == std::string::npos);

  // 3. Plot both traces.
  const fs::path svg = dir / "race.svg";
  rc = run_cli("plot \"" + (race_dir / "trace_exact_s0.csv").string() + "\" \"" +
                   (race_dir / "trace_chain_s0.csv").string() + "\" --out \"" +
                   svg.string() + "\"",
               log);
  INFO("plot log:\n", slurp(log));
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(svg));
  const std::string body = slurp(svg);
  CHECK(body.rfind("<svg", 0) == 0);
  CHECK(body.find("</svg>") != std::string::npos);

  // 4. Assess estimators on the same dataset.
  write_json(dir / "assess.json",
             {{"dataset", (dir / "tiny.csv").generic_string()},
              {"estimators",
               {{{"kind", "nis"}, {"iterations", 4}},
                {{"kind", "imh_uniform"}, {"iterations", 4}}}},
              {"replicates", 50},
              {"seed", 1}});
  const fs::path assess_csv = dir / "assess.csv";
  rc = run_cli("assess --config \"" + (dir / "assess.json").string() + "\" --out \"" +
                   assess_csv.string() + "\"",
               log);
  INFO("assess log:\n", slurp(log));
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(assess_csv));
  const std::string csv = slurp(assess_csv);
  CHECK(csv.find("nis") != std::string::npos);
  CHECK(csv.find("imh_uniform") != std::string::npos);
}

TEST_CASE("bad input exits 1, an unreachable reference exits 2") {
  if (!coxbench_bin()) {
    MESSAGE("COXBENCH_BIN not set; skipping CLI checks");
    return;
  }
  const fs::path dir = fresh_dir("failures");
  const fs::path log = dir / "log.txt";

  // Race config with no data source.
  write_json(dir / "bad_race.json",
             {{"penalty", {{"preset", "low_ridge"}}},
              {"budget", 100},
              {"solvers", {{{"name", "a"}, {"algorithm", "fista"}}}}});
  CHECK(run_cli("race --config \"" + (dir / "bad_race.json").string() + "\"", log) == 1);

  // Missing trace file.
  CHECK(run_cli("plot \"" + (dir / "nothing.csv").string() + "\" --out \"" +
                    (dir / "x.svg").string() + "\"",
                log) == 1);

  // No subcommand at all.
  CHECK(run_cli("", log) == 1);

  // A reference solve that cannot finish inside its budget.
  write_json(dir / "ref.json", {{"simulate", {{"n_obs", 40}, {"dims", 3}, {"seed", 2}}},
                                {"penalty", {{"preset", "low_ridge"}}}});
  CHECK(run_cli("reference --config \"" + (dir / "ref.json").string() + "\" --out \"" +
                    (dir / "cache").string() + "\" --budget 10",
                log) == 2);
}

}  // TEST_SUITE("cli")
