#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fwave_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  std::string cmd = std::string("env -u FWAVE_OUT_DIR ") + FWAVE_EXE + " " + args + " > " + log.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

json json_data(const fs::path& p) { return json::parse(slurp(p))["data"]; }

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* kSmallPropagate =
    R"({"h": 0.015625, "a": 0.0625,
        "propagate": {"t": [0, 0.25], "x_max": 0.125, "x_steps": 5, "y_min": -0.1, "y_max": 0.4, "y_steps": 41}})";

}  // namespace

TEST_CASE("zeros: default table and a single row") {
  fs::path d = work_dir("zeros");
  REQUIRE(run("zeros --out " + (d / "a").string(), d / "log") == 0);
  auto rows = csv_rows(d / "a" / "zeros.csv");
  CHECK(rows.size() == 200u);
  write(d / "one.json", R"({"zeros": {"k_max": 1}})");
  REQUIRE(run("zeros --config " + (d / "one.json").string() + " --out " + (d / "b").string(), d / "log") == 0);
  rows = csv_rows(d / "b" / "zeros.csv");
  REQUIRE(rows.size() == 1u);
  CHECK(std::abs(rows[0][1] - 2.33) < 0.01);
}

TEST_CASE("malformed and invalid configs exit with code 2") {
  fs::path d = work_dir("bad");
  write(d / "bad.json", "{\"h\": ");
  CHECK(run("zeros --config " + (d / "bad.json").string() + " --out " + d.string(), d / "log") == 2);
  CHECK(slurp(d / "log").find("ConfigError") != std::string::npos);
  write(d / "unknown.json", R"({"zeros": {"kmax": 3}})");
  CHECK(run("zeros --config " + (d / "unknown.json").string() + " --out " + d.string(), d / "log") == 2);
  CHECK(run("nosuchcommand", d / "log") == 2);
}

TEST_CASE("propagate: Dirichlet column, t = 0 peak at the source, manifest echo") {
  fs::path d = work_dir("prop");
  write(d / "c.json", kSmallPropagate);
  REQUIRE(run("propagate --config " + (d / "c.json").string() + " --out " + d.string(), d / "log") == 0);
  auto rows = csv_rows(d / "propagate.csv");
  REQUIRE(rows.size() == 2u * 5u * 41u);
  double best = 0.0, best_x = -1.0;
  for (const auto& r : rows) {
    if (r[1] == 0.0) {
      CHECK(r[3] == 0.0);
      CHECK(r[4] == 0.0);
    }
    if (r[0] == 0.0 && r[5] > best) {
      best = r[5];
      best_x = r[1];
    }
  }
  CHECK(best_x == 0.0625);
  json m = json_data(d / "propagate.manifest.json");
  CHECK(m["h"].get<double>() == 0.015625);
  CHECK(m["a"].get<double>() == 0.0625);
}

TEST_CASE("outputs are identical across thread counts") {
  fs::path d = work_dir("det");
  write(d / "c.json", kSmallPropagate);
  std::string c = " --config " + (d / "c.json").string();
  REQUIRE(run("propagate" + c + " --threads 1 --out " + (d / "t1").string(), d / "log") == 0);
  REQUIRE(run("propagate" + c + " --threads 2 --out " + (d / "t2").string(), d / "log") == 0);
  for (const char* f : {"propagate.csv", "propagate.manifest.json", "propagate.config.json"})
    CHECK(slurp(d / "t1" / f) == slurp(d / "t2" / f));
  REQUIRE(run("caustics --a 0.04 --h 0.00390625 --threads 1 --out " + (d / "c1").string(), d / "log") == 0);
  REQUIRE(run("caustics --a 0.04 --h 0.00390625 --threads 2 --out " + (d / "c2").string(), d / "log") == 0);
  CHECK(slurp(d / "c1" / "wavefront.csv") == slurp(d / "c2" / "wavefront.csv"));
  CHECK(slurp(d / "c1" / "caustic_events.json") == slurp(d / "c2" / "caustic_events.json"));
}

TEST_CASE("every output file carries the provenance header") {
  fs::path d = work_dir("hdr");
  REQUIRE(run("modes --out " + d.string(), d / "log") == 0);
  for (const auto& e : fs::directory_iterator(d)) {
    if (e.path().filename() == "log") continue;
    std::string s = slurp(e.path());
    CAPTURE(e.path().string());
    if (e.path().extension() == ".csv") {
      CHECK(s.rfind("# module=modes config_hash=", 0) == 0);
    } else {
      json j = json::parse(s);
      CHECK(j["meta"]["module"] == "modes");
      CHECK(j["meta"].contains("config_hash"));
      CHECK(j["meta"].contains("version"));
    }
  }
}

TEST_CASE("output directory precedence: flag over environment over config") {
  fs::path d = work_dir("outdir");
  std::string env = "FWAVE_OUT_DIR=" + (d / "env").string() + " ";
  std::string cmd = env + FWAVE_EXE + " zeros > " + (d / "log").string() + " 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(d / "env" / "zeros.csv"));
  cmd = env + FWAVE_EXE + " zeros --out " + (d / "flag").string() + " > " + (d / "log").string() + " 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(d / "flag" / "zeros.csv"));
}

TEST_CASE("caustics: one swallowtail for N = 1, none for N = 0") {
  fs::path d = work_dir("caus");
  write(d / "n1.json", R"({"caustics": {"N": [1]}})");
  REQUIRE(run("caustics --config " + (d / "n1.json").string() + " --out " + (d / "n1").string(), d / "log") == 0);
  json ev = json_data(d / "n1" / "caustic_events.json");
  REQUIRE(ev.size() == 1u);
  CHECK(ev[0]["kind"] == "swallowtail");
  double a = 0.0625, ts = 4.0 * std::sqrt(a * (1 + a));
  CHECK(std::abs(ev[0]["t"].get<double>() / ts - 1.0) <= 0.02);
  write(d / "n0.json", R"({"caustics": {"N": [0]}})");
  REQUIRE(run("caustics --config " + (d / "n0.json").string() + " --out " + (d / "n0").string(), d / "log") == 0);
  CHECK(json_data(d / "n0" / "caustic_events.json").empty());
}

TEST_CASE("decay: default fit, peaks at a = 0.04, inadmissible regime") {
  fs::path d = work_dir("decay");
  REQUIRE(run("decay --out " + (d / "def").string(), d / "log") == 0);
  json r = json_data(d / "def" / "decay_report.json");
  CHECK(r["regime"] == "gallery");
  CHECK(r["fit"]["residual"].get<double>() < 0.2);
  REQUIRE(run("decay --a 0.04 --out " + (d / "a04").string(), d / "log") == 0);
  CHECK_FALSE(json_data(d / "a04" / "decay_report.json")["peaks"].empty());
  CHECK(run("decay --a 0.3 --out " + (d / "bad").string(), d / "log") != 0);
  CHECK(slurp(d / "log").find("RegimeViolation") != std::string::npos);
}
