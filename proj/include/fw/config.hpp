#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace fw {

// Effective configuration: documented defaults, then the config file, then the output-directory environment
// variable, then command line flags.
struct RunConfig {
  nlohmann::json tree;

  double h() const { return tree.at("h").get<double>(); }
  double a() const { return tree.at("a").get<double>(); }
  int d() const { return tree.at("d").get<int>(); }
  int threads() const { return tree.at("threads").get<int>(); }
  std::uint64_t seed() const { return tree.at("seed").get<std::uint64_t>(); }
  std::string out_dir() const { return tree.at("out").get<std::string>(); }
  const nlohmann::json& section(const std::string& name) const { return tree.at(name); }
};

inline constexpr const char* kOutDirEnv = "FWAVE_OUT_DIR";

nlohmann::json default_config();

// Throws ConfigError on unknown keys, type mismatches and out-of-range values.
void validate_config(const nlohmann::json& tree);

// Recursive merge; keys of `patch` must already exist in `base`.
void merge_config(nlohmann::json& base, const nlohmann::json& patch, const std::string& where = "");

RunConfig load_config(const std::string& path);  // empty path: defaults only
RunConfig config_from_json(const nlohmann::json& patch);

// Hash of the effective config without the thread count and output directory, so outputs do not depend on
// either.
std::string config_hash(const RunConfig& cfg);
nlohmann::json config_echo(const RunConfig& cfg);

}  // namespace fw
