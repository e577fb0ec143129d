#include "hbt/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace hbt::output {

std::string format_scientific(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("csv: empty header");
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size())
    throw std::invalid_argument("csv: row width does not match header");
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_scientific(values[i]);
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << str();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

nlohmann::ordered_json make_manifest(const std::string& command, const RunConfig& cfg,
                                     const std::string& timestamp) {
  nlohmann::ordered_json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["timestamp"] = timestamp;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.entries()) c[k] = v;
  m["config"] = c;
  m["derived"] = nlohmann::ordered_json::object();
  m["outputs"] = nlohmann::ordered_json::array();
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace hbt::output
