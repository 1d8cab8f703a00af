#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
  const char* p = std::getenv("PROGEQ_CLI");
  REQUIRE_MESSAGE(p != nullptr, "PROGEQ_CLI must point at the progeq binary");
  return p;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = std::string("/tmp/progeq_test_") + name;
  std::ofstream f(path, std::ios::binary);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("builtin listing") {
  RunResult r = run("simulate --list");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("pirates-correlated-eq") != std::string::npos);
  CHECK(r.out.find("trust-simple-doublesample") != std::string::npos);
  CHECK(r.out.find("game      pd3") != std::string::npos);
}

TEST_CASE("cooperative scenario reports the equilibrium payoff") {
  RunResult r = run("simulate pirates-correlated-eq --trials 2000");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"non_halt_rate\": 0.0") != std::string::npos);
  // All mass on (C,C,C); payoff exactly 10.
  CHECK(r.out.find("\"C,C,C\": 2000") != std::string::npos);
  CHECK(r.out.find("10.0") != std::string::npos);
}

TEST_CASE("two-sided trust scenario hits (S,F) with certainty") {
  RunResult r = run("simulate trust-simple-doublesample --trials 1000");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"S,F\": 1000") != std::string::npos);
}

TEST_CASE("reports are byte-deterministic") {
  const std::string args =
      "simulate pirates-correlated-eq --trials 500 --seed 42";
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  // Thread count must not change the report body.
  RunResult c = run(args + " --threads 4");
  RunResult d = run(args);
  // The config echo includes the thread count; compare results sections.
  auto results = [](const std::string& s) {
    return s.substr(s.find("\"results\""));
  };
  CHECK(results(c.out) == results(d.out));
}

TEST_CASE("csv format flattens the same report") {
  RunResult r =
      run("simulate pirates-correlated-eq --trials 200 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("key,value\n", 0) == 0);
  CHECK(r.out.find("\"results.outcome_counts.C,C,C\",200") !=
        std::string::npos);
}

TEST_CASE("game and scenario files parse with exact rationals") {
  std::string game = write_temp("game.json", R"({
    "players": ["row", "col"],
    "actions": [["H", "T"], ["H", "T"]],
    "payoffs": [[[ "1/2", "-1/2"], [-1, 1]], [[-1, 1], ["1/2", "-1/2"]]]
  })");
  std::string scenario = write_temp("scenario.json", R"({
    "game": ")" + game + R"(",
    "mode": "uncorrelated",
    "epsilon": 0.5,
    "trials": 300,
    "seed": 7,
    "bots": [{"type": "constant", "action": "H"},
             {"type": "constant", "action": "T"}]
  })");
  RunResult r = run("simulate " + scenario);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"H,T\": 300") != std::string::npos);
  CHECK(r.out.find("-1.0") != std::string::npos);
}

TEST_CASE("parse errors exit with code 2") {
  CHECK(run("simulate /nonexistent/scenario.json").exit_code == 2);
  std::string bad = write_temp("bad.json", "{ not json");
  CHECK(run("simulate " + bad).exit_code == 2);
  std::string arity = write_temp("arity.json", R"({
    "game": "pd3", "bots": [{"type": "constant", "action": 0}]
  })");
  CHECK(run("simulate " + arity).exit_code == 2);
  std::string badmode = write_temp("badmode.json", R"({
    "game": "pd3", "mode": "sideways",
    "bots": [{"type": "constant", "action": 0},
             {"type": "constant", "action": 0},
             {"type": "constant", "action": 0}]
  })");
  CHECK(run("simulate " + badmode).exit_code == 2);
}

TEST_CASE("excessive non-halting exits with code 3") {
  // Naive simulators at eps = 0.25 halt with probability 1/3 < threshold.
  std::string scenario = write_temp("nonhalt.json", R"({
    "game": "pd3", "mode": "uncorrelated", "epsilon": 0.25,
    "trials": 300, "seed": 3, "fuel": {"depth": 120},
    "non_halt_limit": 0.5,
    "bots": [{"type": "naive-sim", "coop": "C", "defect": "D"},
             {"type": "naive-sim", "coop": "C", "defect": "D"},
             {"type": "naive-sim", "coop": "C", "defect": "D"}]
  })");
  RunResult r = run("simulate " + scenario);
  CHECK(r.exit_code == 3);
}

TEST_CASE("check-eq verdicts") {
  RunResult nash = run("check-eq pd3-allD --trials 400");
  CHECK(nash.exit_code == 0);
  CHECK(nash.out.find("\"overall\": \"equilibrium-consistent\"") !=
        std::string::npos);
  RunResult dev = run("check-eq pirates-uncorrelated --trials 4000");
  CHECK(dev.exit_code == 0);
  CHECK(dev.out.find("\"overall\": \"not-equilibrium\"") !=
        std::string::npos);
  CHECK(dev.out.find("\"profitable\": true") != std::string::npos);
}

TEST_CASE("paper-suite filter runs a single criterion") {
  RunResult r = run("paper-suite --filter tables");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("payoff tables exact") != std::string::npos);
  CHECK(r.out.find("1 criteria, 0 failed") != std::string::npos);
}

TEST_CASE("seed can come from the environment") {
  RunResult a = run("simulate pirates-correlated-eq --trials 100 --seed 99");
  setenv("PROGEQ_SEED", "99", 1);
  RunResult b = run("simulate pirates-correlated-eq --trials 100");
  unsetenv("PROGEQ_SEED");
  auto results = [](const std::string& s) {
    return s.substr(s.find("\"results\""));
  };
  CHECK(results(a.out) == results(b.out));
  CHECK(b.out.find("\"seed\": 99") != std::string::npos);
}
