#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liouville::cli {

/// 17 significant digits so values survive a text round trip.
std::string format_real(double value);
std::string format_real(const std::optional<double>& value);

/// Accumulates a CSV table in memory; write() emits it with '\n' line ends.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes every artifact under `dir` plus `<command>.manifest.json` holding the
/// resolved configuration and each artifact's sha256.
class RunOutput {
public:
  RunOutput(std::filesystem::path dir, std::string command);

  void add(const std::string& name, const std::string& bytes);
  void add_json(const std::string& name, const nlohmann::ordered_json& value);
  void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
  void write() const;

private:
  std::filesystem::path dir_;
  std::string command_;
  nlohmann::ordered_json config_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

} // namespace liouville::cli
