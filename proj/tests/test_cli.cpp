#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oscswap/cli.hpp"

using namespace oscswap;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string log;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "oscswap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), log, err);
  return {code, log.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oscswap_cli_" + name);
  fs::remove_all(p);
  return p;
}

io::json read_json(const fs::path& p) {
  std::ifstream f(p);
  return io::json::parse(f);
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell.empty() ? NAN : std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"design", "--w2", "abc"}).code == cli::kUsage);
  CHECK(run({"design", "--tf", "5"}).code == cli::kUsage);  // lambda missing
  CHECK(run({"design", "--lambda", "1", "--w1", "-1", "--out", scratch("neg").string()}).code ==
        cli::kUsage);
  CHECK(run({"verify", "--lambda", "1", "--state", "x", "--out", scratch("badstate").string()})
            .code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("labels parse as n,k") {
  CHECK(cli::parse_label("2,5") == FockLabel{2, 5});
  CHECK_THROWS(cli::parse_label("2"));
  CHECK_THROWS(cli::parse_label("-1,0"));
  CHECK_THROWS(cli::parse_label("1,2x"));
  CHECK(cli::table_labels().size() == 12);
}

TEST_CASE("design writes the table, curves and snapshots") {
  const fs::path out = scratch("design");
  const Run r = run({"design", "--w2", "5", "--tf", "5", "--lambda", "20", "--out", out.string()});
  REQUIRE(r.code == cli::kOk);
  for (const char* f : {"protocol.json", "protocol.csv", "curves.csv", "ellipses.csv"})
    CHECK(fs::exists(out / f));
  const io::json j = read_json(out / "protocol.json");
  CHECK(j["config"]["lambda"] == 20.0);
  CHECK(j["version"] == std::string(io::version()));
  const auto& samples = j["result"]["table"]["samples"];
  CHECK(samples.size() == 2001);
  CHECK(std::abs(samples.back()["theta"].get<double>() - 1.5707963267949) < 1e-9);
  const auto rows = read_csv(out / "protocol.csv");
  CHECK(rows.size() == 2001);
  CHECK(std::abs(rows.back()[4] - kHalfPi) < 1e-9);
  CHECK(read_csv(out / "ellipses.csv").size() == 9);
}

TEST_CASE("design with lambda = 0 has no coupling") {
  const fs::path out = scratch("design0");
  REQUIRE(run({"design", "--tf", "5", "--lambda", "0", "--out", out.string()}).code == cli::kOk);
  for (const auto& row : read_csv(out / "protocol.csv")) CHECK(std::abs(row[2]) < 1e-12);
}

TEST_CASE("large lambda gives a theta rate with two maxima") {
  const fs::path out = scratch("design40");
  REQUIRE(run({"design", "--tf", "5", "--w2", "5", "--lambda", "40", "--out", out.string()}).code ==
          cli::kOk);
  const auto rows = read_csv(out / "curves.csv");
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i)
    if (rows[i][2] > rows[i - 1][2] && rows[i][2] >= rows[i + 1][2]) ++maxima;
  CHECK(maxima == 2);
}

TEST_CASE("design singularity maps to exit code 2") {
  const fs::path out = scratch("design80");
  const Run r = run({"design", "--tf", "5", "--lambda", "80", "--out", out.string()});
  CHECK(r.code == cli::kDesign);
  CHECK(r.err.find("lambda = 80") != std::string::npos);
  CHECK(r.err.find("t = ") != std::string::npos);
}

TEST_CASE("reruns reproduce the output byte for byte") {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  REQUIRE(run({"design", "--lambda", "12", "--samples", "101", "--out", a.string()}).code == 0);
  REQUIRE(run({"design", "--lambda", "12", "--samples", "101", "--out", b.string()}).code == 0);
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(a / "protocol.json") == slurp(b / "protocol.json"));
  CHECK(slurp(a / "curves.csv") == slurp(b / "curves.csv"));
}

TEST_CASE("tune finds lambda* and reports an empty window with exit code 3") {
  const fs::path out = scratch("tune");
  const Run ok = run({"tune", "--tf", "5", "--w2", "5", "--out", out.string()});
  REQUIRE(ok.code == cli::kOk);
  const io::json j = read_json(out / "tune.json");
  CHECK(std::abs(j["result"]["lambda_star"]["lambda_star"].get<double>() - 18.81) < 0.05);
  CHECK(fs::exists(out / "scan_b.csv"));

  const fs::path none = scratch("tune_none");
  const Run bad = run({"tune", "--tf", "5", "--w2", "5", "--lambda-window", "0", "1", "--out",
                       none.string()});
  CHECK(bad.code == cli::kTuning);
  const io::json jb = read_json(none / "tune.json");
  CHECK(jb["result"]["lambda_star"].is_null());
  CHECK(jb["result"]["best"]["b"].get<double>() > 0.0);
}

TEST_CASE("table rows on a small grid") {
  const fs::path out = scratch("table");
  const Run r = run({"table", "--state", "1,0", "--state", "5,2", "--grid", "128", "--dt",
                     "0.0005", "--mesh-nodes", "9", "--steps", "4000", "--out", out.string()});
  REQUIRE(r.code == cli::kOk);
  const io::json j = read_json(out / "table.json");
  const auto& rows = j["result"]["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0]["delta_predicted"].get<double>() - 2.6134) < 5e-4);
  CHECK(rows[1]["E0"] == 18.0);
  CHECK(std::abs(rows[1]["delta_predicted"].get<double>() - 7.8402) < 5e-4);
  CHECK(rows[0]["dev_split_predicted"].get<double>() < 0.01);
  CHECK(rows[0]["dev_wigner_predicted"].get<double>() < 0.01);
}

TEST_CASE("verify reports the swapped-state fidelity and the transient curve") {
  const fs::path out = scratch("verify");
  const Run r = run({"verify", "--tf", "5", "--w2", "5", "--lambda", "18.8186", "--state", "1,0",
                     "--grid", "128", "--dt", "0.002", "--mesh-nodes", "8", "--steps", "2000",
                     "--record-points", "50", "--out", out.string()});
  REQUIRE(r.code == cli::kOk);
  const io::json j = read_json(out / "verify.json");
  CHECK(j["result"]["states"][0]["fidelity_swapped"].get<double>() >= 0.999);
  const auto curve = read_csv(out / "transient_1_0.csv");
  REQUIRE(curve.size() == 51);
  CHECK(curve.back()[1] == doctest::Approx(curve.back()[2]).epsilon(1e-3));
  double largest = 0.0;
  for (const auto& row : curve)
    if (!std::isnan(row[2])) largest = std::max(largest, std::abs(row[1] - row[2]));
  CHECK(largest > 0.1);
}

TEST_CASE("verify on an unresolvable grid is a verification failure") {
  const fs::path out = scratch("verify_bad");
  const Run r = run({"verify", "--lambda", "5", "--state", "30,0", "--grid", "64", "--dt", "0.05",
                     "--mesh-nodes", "4", "--steps", "100", "--out", out.string()});
  CHECK(r.code == cli::kVerification);
}
