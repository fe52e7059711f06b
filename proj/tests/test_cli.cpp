#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "qbell/types.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_path = "/tmp/qbell_test_out_" + std::to_string(counter);
  const std::string err_path = "/tmp/qbell_test_err_" + std::to_string(counter);
  ++counter;
  const std::string cmd =
      std::string(QBELL_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::string> csv_data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

}  // namespace

TEST_CASE("eval-w: single-photon Wigner value at the origin") {
  const RunResult r = run_cli("eval-w --state single-photon --alpha 0 --beta 0 --s 0");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["w_pair"].get<double>() ==
        doctest::Approx(-4.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
  CHECK(doc["config"]["command"] == "eval-w");
}

TEST_CASE("eval-w: tmss Wigner value at the origin") {
  const RunResult r = run_cli("eval-w --state tmss --r 1 --alpha 0 --beta 0 --s 0");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["w_pair"].get<double>() ==
        doctest::Approx(4.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("eval-w: tmss with oracle check") {
  const RunResult r = run_cli(
      "eval-w --state tmss --r 0.6 --alpha 0.2+0.1i --beta 0.3 --s -0.7 --check-oracle");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["oracle_abs_diff"].get<double>() < 1e-8);
  CHECK(qbell::parse_complex(doc["config"]["alpha"].get<std::string>()) ==
        std::complex<double>(0.2, 0.1));
}

TEST_CASE("eval-w: domain errors exit with code 2 and a named precondition") {
  CHECK(run_cli("eval-w --state single-photon --s 0.5").exit_code == 2);
  CHECK(run_cli("eval-w --state tmss --r -1 --s 0").exit_code == 2);
  CHECK(run_cli("eval-w --state tmss --r -1 --s 0").err.find("r") != std::string::npos);
  CHECK(run_cli("bell-max --state single-photon --s 0 --eta 1.5").exit_code == 2);
}

TEST_CASE("bell-max: fixed settings evaluate without optimization") {
  const RunResult r = run_cli(
      "bell-max --state tmss --r 1 --s 0 --eta 1 --settings 0,0,0,0 --no-optimize");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(std::fabs(doc["result"]["value"].get<double>() - 2.0) < 1e-12);
  CHECK_FALSE(doc["result"]["violated"].get<bool>());
}

TEST_CASE("bell-max: single photon above the Q-test threshold") {
  const RunResult r = run_cli("bell-max --state single-photon --s -1 --eta 0.85");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["result"]["violated"].get<bool>());
  CHECK(doc["result"]["magnitude"].get<double>() > 2.0);
  CHECK(doc["result"]["converged"].get<bool>());
}

TEST_CASE("threshold: eta axis stays near 0.83 for the single photon") {
  const RunResult r = run_cli("threshold --axis eta --state single-photon --s -1");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  const double th = doc["result"]["threshold"].get<double>();
  CHECK(th > 0.82);
  CHECK(th < 0.84);
  CHECK(doc["result"]["bracket_hi"].get<double>() > th);
}

TEST_CASE("threshold: no violation exits with code 4") {
  const RunResult r = run_cli("threshold --axis eta --state single-photon --s -3");
  CHECK(r.exit_code == 4);
}

TEST_CASE("scan: csv layout, config echo, row-major order") {
  const RunResult r = run_cli(
      "scan --state single-photon --s -1:0:3 --eta 0.9:1:2 --restarts 8 --seed 5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("# command=scan") != std::string::npos);
  CHECK(r.out.find("# seed=5") != std::string::npos);
  const auto lines = csv_data_lines(r.out);
  REQUIRE(lines.size() == 7);  // header + 3 x 2 cells
  CHECK(lines[0] ==
        "s,eta,r,bell_magnitude,violated,alpha1,alpha2,beta1,beta2,converged");
  const auto first = split_csv(lines[1]);
  REQUIRE(first.size() == 10);
  CHECK(first[0] == "-1");
  CHECK(first[1] == "0.9");
  const auto second = split_csv(lines[2]);
  CHECK(second[0] == "-1");
  CHECK(second[1] == "1");
  const auto third = split_csv(lines[3]);
  CHECK(third[0] == "-0.5");
  // every numeric field round-trips through the documented literal format
  for (const auto& line : {lines[1], lines[2], lines[3]}) {
    const auto fields = split_csv(line);
    for (int idx : {5, 6, 7, 8})
      CHECK_NOTHROW(qbell::parse_complex(fields[static_cast<std::size_t>(idx)]));
  }
}

TEST_CASE("scan: tmss r-grid emits one block per r in order") {
  const RunResult r = run_cli(
      "scan --state tmss --r 0.3:2:2 --s-list 0,-1 --eta 1 --restarts 16 --seed 2");
  REQUIRE(r.exit_code == 0);
  const auto lines = csv_data_lines(r.out);
  REQUIRE(lines.size() == 5);  // header + 2 r-blocks x 2 s-cells
  auto magnitude = [&](double s, double rr) {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split_csv(lines[i]);
      if (std::stod(f[0]) == s && std::stod(f[2]) == rr) return std::stod(f[3]);
    }
    FAIL("row not found");
    return 0.0;
  };
  // low squeezing favors the Q-function test, high squeezing the Wigner test
  CHECK(magnitude(-1.0, 0.3) > magnitude(0.0, 0.3) + 1e-3);
  CHECK(magnitude(0.0, 2.0) > magnitude(-1.0, 2.0) + 1e-3);
  const auto first = split_csv(lines[1]);
  CHECK(std::stod(first[2]) == 0.3);  // r is the outermost loop
}

TEST_CASE("scan: degenerate 1x1 grid matches bell-max bit for bit") {
  const RunResult scan = run_cli(
      "scan --state tmss --r 0.7 --s -0.5 --eta 0.9 --seed 21 --restarts 16");
  REQUIRE(scan.exit_code == 0);
  const auto lines = csv_data_lines(scan.out);
  REQUIRE(lines.size() == 2);
  const auto fields = split_csv(lines[1]);

  const RunResult bm = run_cli(
      "bell-max --state tmss --r 0.7 --s -0.5 --eta 0.9 --seed 21 --restarts 16");
  REQUIRE(bm.exit_code == 0);
  const json doc = json::parse(bm.out);
  // shortest-round-trip csv vs json double serialization: compare parsed values
  CHECK(std::stod(fields[3]) == doc["result"]["magnitude"].get<double>());
  CHECK(qbell::parse_complex(fields[5]) ==
        qbell::parse_complex(doc["result"]["settings"]["alpha1"].get<std::string>()));
  CHECK(qbell::parse_complex(fields[8]) ==
        qbell::parse_complex(doc["result"]["settings"]["beta2"].get<std::string>()));
}

TEST_CASE("oracle-check: clean run exits 0, starved cutoff exits 6") {
  const RunResult ok = run_cli("oracle-check --trials 20 --seed 7");
  REQUIRE(ok.exit_code == 0);
  const json doc = json::parse(ok.out);
  CHECK(doc["result"]["equivalence"]["max_abs_dev"].get<double>() < 1e-8);
  CHECK(doc["result"]["loss"]["max_abs_dev"].get<double>() < 1e-8);
  CHECK(doc["result"]["passed"].get<bool>());

  const RunResult starved = run_cli("oracle-check --trials 1 --seed 0 --cutoff 2");
  CHECK(starved.exit_code == 6);

  const RunResult loss_only = run_cli("oracle-check --suite loss --trials 50");
  REQUIRE(loss_only.exit_code == 0);
  const json loss_doc = json::parse(loss_only.out);
  CHECK(loss_doc["result"]["loss"]["max_abs_dev"].get<double>() < 1e-8);
  CHECK_FALSE(loss_doc["result"].contains("equivalence"));
}

TEST_CASE("complex literal parsing accepts the documented forms") {
  using qbell::parse_complex;
  CHECK(parse_complex("1.5") == std::complex<double>(1.5, 0.0));
  CHECK(parse_complex("-0.25") == std::complex<double>(-0.25, 0.0));
  CHECK(parse_complex("0.2+0.1i") == std::complex<double>(0.2, 0.1));
  CHECK(parse_complex("0.2-0.1i") == std::complex<double>(0.2, -0.1));
  CHECK(parse_complex("-0.3i") == std::complex<double>(0.0, -0.3));
  CHECK(parse_complex("1e-3+2e-4i") == std::complex<double>(1e-3, 2e-4));
  CHECK(parse_complex("i") == std::complex<double>(0.0, 1.0));
  CHECK_THROWS_AS(parse_complex("abc"), std::domain_error);
  CHECK_THROWS_AS(parse_complex(""), std::domain_error);

  // serialization round-trips exactly
  for (const std::complex<double> z :
       {std::complex<double>(0.1, -0.7), std::complex<double>(-1.0 / 3.0, 0.0),
        std::complex<double>(0.0, 2.0 / 7.0)}) {
    CHECK(parse_complex(qbell::format_complex(z)) == z);
  }
}

TEST_CASE("report files: --output writes the same content as stdout") {
  const std::string path = "/tmp/qbell_test_report.json";
  const RunResult direct =
      run_cli("eval-w --state single-photon --alpha 0.5 --beta 0 --s -1");
  const RunResult filed = run_cli(
      "eval-w --state single-photon --alpha 0.5 --beta 0 --s -1 --output " + path);
  REQUIRE(filed.exit_code == 0);
  CHECK(slurp(path) == direct.out);
  std::remove(path.c_str());
}
