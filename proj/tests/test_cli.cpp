// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT
//
// End-to-end tests that spawn the built CLI binary and check its CSV output,
// stderr reporting, and the exit-code contract (0 ok, 1 validation, 2
// violation / failed reproduction).

#include <qsd/io.hpp>
#include <qsd/utility.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qsd;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::filesystem::path work_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "qsd-cli-tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  const auto dir = work_dir();
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(QSD_CLI_PATH) + " " + args + " > " + out.string() +
                          " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  if (raw != -1 && WIFEXITED(raw)) r.exit_code = WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fixture(const char* name) {
  return std::string(QSD_FIXTURE_DIR) + "/" + name;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> cells_of(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

TEST_CASE("reproduce re-derives the bundled examples", "[cli]") {
  SECTION("example1 passes every check") {
    const CliResult r = run_cli("reproduce example1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("total_confidence_A,2,2,") != std::string::npos);
    CHECK(r.out.find("p_inconclusive_B,0.5,0.5,") != std::string::npos);
    CHECK(r.err.find("PASS p_inconclusive_A_at_a1_1e-6") != std::string::npos);
  }
  SECTION("fig1 passes every check") {
    const CliResult r = run_cli("reproduce fig1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("success_projective,0.85,0.85,") != std::string::npos);
    CHECK(r.out.find("posterior_flip_record_2_2,1,1,0,pass") != std::string::npos);
  }
  SECTION("unknown ids are usage errors") {
    const CliResult r = run_cli("reproduce nope");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("unknown reproduction id") != std::string::npos);
  }
}

TEST_CASE("validation failures exit with code 1", "[cli]") {
  SECTION("missing scenario file") {
    const CliResult r = run_cli("evaluate /nonexistent.json --povm x");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("cannot open") != std::string::npos);
  }
  SECTION("priors that do not sum to one") {
    const auto path = work_dir() / "badpriors.json";
    std::ofstream(path) << R"({"dim": 2, "states": [
      {"label": "a", "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
      {"label": "b", "matrix": [[[0,0],[0,0]],[[0,0],[1,0]]]}],
      "priors": [0.5, 0.6]})";
    const CliResult r = run_cli("evaluate " + path.string() + " --povm x");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("priors") != std::string::npos);
  }
  SECTION("unknown utility name") {
    const CliResult r =
        run_cli("evaluate " + fixture("fig1.json") + " --povm projective --utility bogus");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("unknown utility") != std::string::npos);
  }
  SECTION("unknown measurement name") {
    const CliResult r = run_cli("evaluate " + fixture("fig1.json") + " --povm nope");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("no measurement named") != std::string::npos);
  }
}

TEST_CASE("identical invocations emit byte-identical CSV", "[cli]") {
  SECTION("evaluate") {
    const std::string args =
        "evaluate " + fixture("fig1.json") + " --povm projective --utility p-success";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find(",0.85,") != std::string::npos);
  }
  SECTION("optimize with a pinned seed") {
    const std::string args = "optimize " + fixture("fig1.json") +
                             " --utility p-success --restarts 4 --iterations 120 --seed 7";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("monotone exit codes distinguish clean and violating objectives", "[cli]") {
  SECTION("p-success stays monotone") {
    const CliResult r = run_cli("monotone --utility p-success --trials 15");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "utility,trial,sub_seed,score_before,score_after,magnitude\n");
    CHECK(r.err.find("0 violations") != std::string::npos);
  }
  SECTION("the adversarial control is flagged") {
    const CliResult r = run_cli("monotone --utility anti-success --trials 15");
    CHECK(r.exit_code == 2);
    CHECK(lines_of(r.out).size() >= 2);
  }
}

TEST_CASE("optimized POVM files round-trip within 1e-9", "[cli]") {
  const auto povm_path = work_dir() / "opt.json";
  const auto csv_path = work_dir() / "opt.csv";
  const CliResult r = run_cli("optimize " + fixture("fig1.json") +
                              " --utility p-success --restarts 4 --iterations 150 --seed 3 " +
                              "--povm-out " + povm_path.string() + " --out " + csv_path.string());
  REQUIRE(r.exit_code == 0);

  const std::vector<std::string> rows = lines_of(slurp(csv_path));
  REQUIRE(rows.size() == 2);
  const std::vector<std::string> header = cells_of(rows[0]);
  const std::vector<std::string> cells = cells_of(rows[1]);
  REQUIRE(header.size() == cells.size());
  REQUIRE(header[5] == "score_1");
  const double reported = std::stod(cells[5]);

  const io::ScenarioFile f = io::load_scenario_file(povm_path.string());
  CHECK(f.id == "fig1");
  REQUIRE(f.povms.size() == 1);
  CHECK(f.povms[0].name == "optimized");
  const double replayed =
      average_utility(f.scenario, f.povms[0].povm, make_utility("p-success"))
          .score.components[0];
  CHECK(replayed == Catch::Approx(reported).margin(1e-9));
}

TEST_CASE("repeat emits per-step posteriors", "[cli]") {
  SECTION("an explicit record walks the Bayes update") {
    const CliResult r = run_cli("repeat " + fixture("fig1.json") + " -d 2 --record 2,2");
    CHECK(r.exit_code == 0);
    const std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "step,outcome,p_rho1,p_rho2");
    CHECK(rows[1] == "0,,0.85,0.15");
    CHECK(rows[3] == "2,2,0.386363636364,0.613636363636");
    CHECK(r.err.find("condition fails") != std::string::npos);
  }
  SECTION("d=1 reports the standing guess") {
    const CliResult r = run_cli("repeat " + fixture("fig1.json") + " -d 1");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("guess rho1: condition holds at d=1") != std::string::npos);
    const std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == "0,,0.85,0.15");
  }
  SECTION("--search reports the flipping record") {
    const CliResult r = run_cli("repeat " + fixture("fig1.json") + " -d 2 --search");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("witness record 2,2") != std::string::npos);
  }
  SECTION("out-of-range records are rejected") {
    const CliResult r = run_cli("repeat " + fixture("fig1.json") + " -d 2 --record 0,5");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("record") != std::string::npos);
  }
}

TEST_CASE("strategies enumerates every decision rule", "[cli]") {
  const CliResult r = run_cli("strategies " + fixture("fig1.json") + " --povm projective");
  CHECK(r.exit_code == 0);
  const std::vector<std::string> rows = lines_of(r.out);
  REQUIRE(rows.size() == 10);  // header + 3^2 strategies
  CHECK(r.out.find("1:1,0.85") != std::string::npos);
  CHECK(r.out.find("0:0,0") != std::string::npos);

  SECTION("fixed-strategy evaluation agrees with the table") {
    const CliResult fixed = run_cli("evaluate " + fixture("fig1.json") +
                                    " --povm projective --strategy 1:0");
    CHECK(fixed.exit_code == 0);
    CHECK(fixed.out.find(",fixed,") != std::string::npos);
    CHECK(fixed.out.find("0.708333333333") != std::string::npos);
    CHECK(r.out.find("1:0,0.708333333333") != std::string::npos);
  }
}
