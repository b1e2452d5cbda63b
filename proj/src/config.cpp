#include "fw/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fw/common.hpp"

namespace fw {

using nlohmann::json;

json default_config() {
  return json{
      {"h", 1.0 / 128.0},
      {"a", 0.0625},
      {"d", 2},
      {"epsilon", 0.2},
      {"threads", 1},
      {"seed", 1},
      {"out", "fwave_out"},
      {"zeros", {{"k_max", 200}}},
      {"modes", {{"k_max", 20}, {"eta", 1.0}, {"x_max", 4.0}, {"x_steps", 401}}},
      {"propagate",
       {{"t", json::array({0.0, 0.25, 0.5})},
        {"x_max", 0.2},
        {"x_steps", 41},
        {"y_min", -0.3},
        {"y_max", 0.8},
        {"y_steps", 221},
        {"sign", 1},
        {"eta_nodes", 0}}},
      {"parametrix",
       {{"t", json::array({0.5, 1.0})},
        {"x_steps", 9},
        {"y_half_width", 0.3},
        {"y_steps", 241},
        {"n_min", 0},
        {"n_max", -1},
        {"data", "exact_airy"}}},
      {"caustics",
       {{"N", json::array({0, 1, 2})},
        {"slice_t", json::array()},
        {"mu_nodes", 2000},
        {"t_steps", 200},
        {"class_tol", 1e-2}}},
      {"decay",
       {{"regime", "gallery"},
        {"evaluator", "spectral"},
        {"alpha", 0.55},
        {"t_min_over_h", 4.0},
        {"t_max", 0.5},
        {"t_steps", 16},
        {"peaks", json::array({1, 2, 3})},
        {"dims", json::array({2})}}},
      {"oscint_bench", {{"k", json::array({2, 3, 4})}, {"lambda_min", 1e2}, {"lambda_max", 1e5}, {"lambda_steps", 7}}},
  };
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

double num(const json& s, const char* key) {
  if (!s.at(key).is_number()) bad(std::string(key) + " must be a number");
  return s.at(key).get<double>();
}

int integer(const json& s, const char* key) {
  if (!s.at(key).is_number_integer()) bad(std::string(key) + " must be an integer");
  return s.at(key).get<int>();
}

void number_list(const json& s, const char* key) {
  if (!s.at(key).is_array()) bad(std::string(key) + " must be a list");
  for (const auto& v : s.at(key))
    if (!v.is_number()) bad(std::string(key) + " must hold numbers");
}

}  // namespace

void merge_config(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) bad("config " + (where.empty() ? std::string("root") : where) + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) bad("unknown config key " + key);
    json& dst = base[it.key()];
    if (dst.is_object())
      merge_config(dst, it.value(), key);
    else
      dst = it.value();
  }
}

void validate_config(const json& t) {
  try {
    double h = num(t, "h"), a = num(t, "a");
    if (!(h > 0.0 && h <= 1.0)) bad("h must lie in (0, 1]");
    if (!(a > 0.0 && a <= 1.0)) bad("a must lie in (0, 1]");
    if (integer(t, "d") < 2) bad("d must be >= 2");
    if (!(num(t, "epsilon") > 0.0)) bad("epsilon must be positive");
    if (integer(t, "threads") < 1) bad("threads must be >= 1");
    if (!t.at("seed").is_number_unsigned() && !t.at("seed").is_number_integer()) bad("seed must be an integer");
    if (!t.at("out").is_string()) bad("out must be a string");
    if (integer(t["zeros"], "k_max") < 1) bad("zeros.k_max must be >= 1");
    const json& m = t["modes"];
    if (integer(m, "k_max") < 1 || integer(m, "x_steps") < 2 || !(num(m, "eta") > 0) || !(num(m, "x_max") > 0))
      bad("modes section out of range");
    const json& p = t["propagate"];
    number_list(p, "t");
    if (integer(p, "x_steps") < 1 || integer(p, "y_steps") < 1 || num(p, "x_max") < 0 ||
        !(num(p, "y_max") >= num(p, "y_min")))
      bad("propagate grid out of range");
    if (std::abs(integer(p, "sign")) != 1) bad("propagate.sign must be +1 or -1");
    integer(p, "eta_nodes");
    const json& q = t["parametrix"];
    number_list(q, "t");
    if (integer(q, "x_steps") < 1 || integer(q, "y_steps") < 1 || !(num(q, "y_half_width") > 0))
      bad("parametrix grid out of range");
    integer(q, "n_min");
    integer(q, "n_max");
    if (q.at("data") != "exact_airy" && q.at("data") != "bump_symbol")
      bad("parametrix.data must be exact_airy or bump_symbol");
    const json& c = t["caustics"];
    if (!c.at("N").is_array()) bad("caustics.N must be a list");
    for (const auto& v : c.at("N"))
      if (!v.is_number_integer() || v.get<int>() < 0) bad("caustics.N must hold integers >= 0");
    number_list(c, "slice_t");
    if (integer(c, "mu_nodes") < 10 || integer(c, "t_steps") < 2 || !(num(c, "class_tol") > 0))
      bad("caustics section out of range");
    const json& dc = t["decay"];
    if (dc.at("regime") != "gallery" && dc.at("regime") != "parametrix") bad("decay.regime must be gallery or parametrix");
    if (dc.at("evaluator") != "spectral" && dc.at("evaluator") != "parametrix")
      bad("decay.evaluator must be spectral or parametrix");
    if (!(num(dc, "alpha") > 0 && num(dc, "alpha") < 1)) bad("decay.alpha must lie in (0, 1)");
    if (!(num(dc, "t_min_over_h") > 0) || !(num(dc, "t_max") > 0) || integer(dc, "t_steps") < 2)
      bad("decay grid out of range");
    for (const char* key : {"peaks", "dims"}) {
      if (!dc.at(key).is_array()) bad(std::string("decay.") + key + " must be a list");
      for (const auto& v : dc.at(key))
        if (!v.is_number_integer() || v.get<int>() < 1) bad(std::string("decay.") + key + " must hold integers >= 1");
    }
    const json& ob = t["oscint_bench"];
    if (!ob.at("k").is_array()) bad("oscint_bench.k must be a list");
    for (const auto& v : ob.at("k"))
      if (!v.is_number_integer() || v.get<int>() < 2) bad("oscint_bench.k must hold integers >= 2");
    if (!(num(ob, "lambda_min") > 0) || !(num(ob, "lambda_max") > num(ob, "lambda_min")) ||
        integer(ob, "lambda_steps") < 2)
      bad("oscint_bench lambda grid out of range");
  } catch (const json::exception& e) {
    bad(std::string("malformed config: ") + e.what());
  }
}

RunConfig config_from_json(const json& patch) {
  RunConfig cfg;
  cfg.tree = default_config();
  if (!patch.is_null()) merge_config(cfg.tree, patch);
  validate_config(cfg.tree);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  json patch;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
    try {
      patch = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::ConfigError, std::string("cannot parse ") + path + ": " + e.what());
    }
  }
  RunConfig cfg = config_from_json(patch);
  if (const char* env = std::getenv(kOutDirEnv); env && *env) cfg.tree["out"] = env;
  return cfg;
}

json config_echo(const RunConfig& cfg) {
  json e = cfg.tree;
  e.erase("threads");
  e.erase("out");
  return e;
}

std::string config_hash(const RunConfig& cfg) {
  std::string s = config_echo(cfg).dump();
  std::uint64_t x = 1469598103934665603ull;
  for (unsigned char c : s) {
    x ^= c;
    x *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace fw
