#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fw/common.hpp"
#include "fw/config.hpp"
#include "fw/io.hpp"
#include "support.hpp"

using namespace fw;
using fwtest::for_all;
using fwtest::Gen;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fwave_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::OverflowGuard;
}

}  // namespace

TEST_CASE("defaults validate and match the documented values") {
  RunConfig c = config_from_json(nlohmann::json::object());
  CHECK(c.h() == 1.0 / 128);
  CHECK(c.a() == 0.0625);
  CHECK(c.d() == 2);
  CHECK(c.threads() == 1);
  CHECK(c.section("zeros").at("k_max") == 200);
  CHECK_NOTHROW(validate_config(default_config()));
}

TEST_CASE("unknown keys and bad values are config errors") {
  CHECK(kind_of([] { config_from_json({{"hh", 0.1}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { config_from_json({{"zeros", {{"kmax", 3}}}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { config_from_json({{"h", -1.0}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { config_from_json({{"h", "small"}}); }) == ErrorKind::ConfigError);
  CHECK(exit_code_for(ErrorKind::ConfigError) == 2);
  CHECK(exit_code_for(ErrorKind::ConvergenceFailure) == 1);
}

TEST_CASE("file loading with comments and the output override") {
  fs::path d = scratch_dir("cfg");
  fs::path f = d / "run.json";
  std::ofstream(f) << "{\n  // smaller step\n  \"h\": 0.015625,\n  \"zeros\": {\"k_max\": 5}\n}\n";
  unsetenv(kOutDirEnv);
  RunConfig c = load_config(f.string());
  CHECK(c.h() == 0.015625);
  CHECK(c.section("zeros").at("k_max") == 5);
  setenv(kOutDirEnv, "/tmp/elsewhere", 1);
  CHECK(load_config(f.string()).out_dir() == "/tmp/elsewhere");
  unsetenv(kOutDirEnv);
  std::ofstream(d / "bad.json") << "{ \"h\": ";
  CHECK(kind_of([&] { load_config((d / "bad.json").string()); }) == ErrorKind::ConfigError);
  CHECK_THROWS_AS(load_config((d / "missing.json").string()), Error);
}

TEST_CASE("hash ignores threads and output directory only") {
  RunConfig base = config_from_json(nlohmann::json::object());
  CHECK(config_hash(base) == config_hash(config_from_json({{"threads", 4}, {"out", "x"}})));
  CHECK(config_hash(base) != config_hash(config_from_json({{"seed", 2}})));
  CHECK(config_hash(base) != config_hash(config_from_json({{"a", 0.04}})));
  CHECK(config_echo(base).contains("h"));
  CHECK_FALSE(config_echo(base).contains("threads"));
}

TEST_CASE("shortest doubles round trip") {
  for_all(2000, 111, [](Gen& g, int) {
    double v = std::ldexp(g.uniform(-1.0, 1.0), g.integer(-300, 300));
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  });
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV and JSON carry the provenance header") {
  fs::path d = scratch_dir("io");
  OutputMeta m = make_meta("zeros", "abc123");
  write_csv((d / "t.csv").string(), m, {"k", "omega"}, {{1, 2.338107410459767}});
  std::string s = slurp(d / "t.csv");
  CHECK(s.rfind("# module=zeros config_hash=abc123 version=", 0) == 0);
  CHECK(s.find("\nk,omega\n1,2.338107410459767\n") != std::string::npos);
  write_json((d / "t.json").string(), m, {{"x", 1}});
  auto j = nlohmann::json::parse(slurp(d / "t.json"));
  CHECK(j["meta"]["module"] == "zeros");
  CHECK(j["meta"]["config_hash"] == "abc123");
  CHECK(j["data"]["x"] == 1);
  CHECK(kind_of([&] { write_csv("/proc/nonexistent/x.csv", m, {"a"}, {}); }) == ErrorKind::IOError);
}
