#include "fw/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "fw/common.hpp"

#ifndef FW_VERSION
#define FW_VERSION "dev"
#endif

namespace fw {

OutputMeta make_meta(const std::string& module, const std::string& config_hash) {
  return {module, config_hash, FW_VERSION};
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IOError, "cannot create " + dir + ": " + ec.message());
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) ensure_dir(p.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path);
  return out;
}

}  // namespace

void write_csv(const std::string& path, const OutputMeta& meta, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  out << "# module=" << meta.module << " config_hash=" << meta.config_hash << " version=" << meta.version << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw Error(ErrorKind::IOError, "row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << "\n";
  }
  if (!out) throw Error(ErrorKind::IOError, "write failed for " + path);
}

void write_json(const std::string& path, const OutputMeta& meta, const nlohmann::json& body) {
  std::ofstream out = open_out(path);
  nlohmann::json doc{{"meta", {{"module", meta.module}, {"config_hash", meta.config_hash}, {"version", meta.version}}},
                     {"data", body}};
  out << doc.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::IOError, "write failed for " + path);
}

}  // namespace fw
