#pragma once

// File outputs: CSV tables, sorted-key JSON documents, SHA-256 content hashes
// and the run manifest that is written after everything else.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"

namespace abc::cli {

using Json = nlohmann::json;

// %.17g formatting.
std::string formatReal(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void addRow(const std::vector<double>& row);
  // Rows whose cells are preformatted strings.
  void addTextRow(std::vector<std::string> row);

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  // Header, then one LF-terminated line per row.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Parses a CSV written by CsvTable: header plus numeric rows.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a header column; throws UsageError if absent.
  std::size_t column(const std::string& name) const;
};
CsvData readCsv(const std::filesystem::path& path);

std::string sha256Hex(const std::string& bytes);
std::string sha256File(const std::filesystem::path& path);

// Collects files for one run and writes the manifest last.
class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, const RunConfig& config);

  // `<command>-<slug><suffix>`, e.g. suffix ".csv" or "-mask.svg".
  std::filesystem::path pathFor(const std::string& suffix) const;

  void write(const std::string& suffix, const std::string& bytes);
  void writeJson(const std::string& suffix, const Json& doc);

  // Manifest: command, resolved config, version, wall time, summary, and each
  // written file with its SHA-256. Returns the manifest path.
  std::filesystem::path writeManifest(const Json& summary, double wallSeconds, int threads);

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  RunConfig config_;
  std::vector<std::filesystem::path> files_;
};

// Pretty-printed with 2-space indentation, sorted keys, trailing LF.
std::string dumpJson(const Json& doc);

}  // namespace abc::cli
