#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace fw {

struct OutputMeta {
  std::string module;
  std::string config_hash;
  std::string version;
};

OutputMeta make_meta(const std::string& module, const std::string& config_hash);

// Shortest round-trip representation.
std::string format_double(double v);

void ensure_dir(const std::string& dir);

// First line: "# module=<m> config_hash=<h> version=<v>", then the column names.
void write_csv(const std::string& path, const OutputMeta& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// {"meta": {...}, "data": body}
void write_json(const std::string& path, const OutputMeta& meta, const nlohmann::json& body);

}  // namespace fw
