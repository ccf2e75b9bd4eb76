#include "output.hpp"

#include "liouville/errors.hpp"
#include "liouville/graph_io.hpp"

#include <Eigen/Core>
#include <fmt/format.h>

#include <fstream>

namespace liouville::cli {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

std::string format_real(const std::optional<double>& value) {
  return value ? format_real(*value) : std::string();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::logic_error("csv row width does not match header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0)
        out.push_back(',');
      out += cells[k];
    }
    out.push_back('\n');
  };
  append(header_);
  for (const auto& r : rows_)
    append(r);
  return out;
}

RunOutput::RunOutput(std::filesystem::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)) {}

void RunOutput::add(const std::string& name, const std::string& bytes) {
  artifacts_.emplace_back(name, bytes);
}

void RunOutput::add_json(const std::string& name, const nlohmann::ordered_json& value) {
  add(name, value.dump(2) + "\n");
}

void RunOutput::write() const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec)
    throw ArgumentError("cannot create output directory " + dir_.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["command"] = command_;
  manifest["tool_version"] = "1.0.0";
  manifest["eigen_version"] = fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                          EIGEN_MINOR_VERSION);
  manifest["config"] = config_;
  nlohmann::ordered_json checksums = nlohmann::ordered_json::object();
  for (const auto& [name, bytes] : artifacts_) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out)
      throw ArgumentError("cannot write " + (dir_ / name).string());
    out << bytes;
    checksums[name] = {{"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}};
  }
  manifest["artifacts"] = checksums;
  std::ofstream out(dir_ / (command_ + ".manifest.json"), std::ios::binary);
  out << manifest.dump(2) << "\n";
}

} // namespace liouville::cli
