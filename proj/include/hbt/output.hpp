#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbt/config.hpp"

namespace hbt::output {

inline constexpr const char* kToolName = "hbtsim";
inline constexpr const char* kToolVersion = "1.0.0";

/// %.16e: 17 significant digits in scientific notation.
std::string format_scientific(double value);

/// Comma-separated table with a header row. Rows are buffered and written
/// in insertion order by save(); throws std::runtime_error if the path is
/// not writable.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void save(const std::filesystem::path& path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

/// Run manifest: tool, command, timestamp, canonical config (as strings, so it
/// reloads exactly), derived quantities, and the list of files written.
nlohmann::ordered_json make_manifest(const std::string& command, const RunConfig& cfg,
                                     const std::string& timestamp);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

/// `stem` + `suffix`, keeping any directory part of the stem.
std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix);

}  // namespace hbt::output
