#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#ifndef ABC_ORBITS_VERSION
#define ABC_ORBITS_VERSION "0.0.0"
#endif

namespace abc::cli {

std::string formatReal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::addRow(const std::vector<double>& row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (double v : row) cells.push_back(formatReal(v));
  addTextRow(std::move(cells));
}

void CsvTable::addTextRow(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("CSV row width mismatch");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw UsageError("CSV has no column '" + name + "'");
}

CsvData readCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path.string() + "'");
  CsvData data;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    if (first) {
      while (std::getline(cells, cell, ',')) data.header.push_back(cell);
      first = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw UsageError("non-numeric CSV cell '" + cell + "' in " + path.string());
      }
    }
    if (row.size() != data.header.size()) {
      throw UsageError("ragged CSV row in " + path.string());
    }
    data.rows.push_back(std::move(row));
  }
  if (first) throw UsageError("empty CSV file " + path.string());
  return data;
}

std::string sha256Hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 0xF];
  }
  return out;
}

std::string sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256Hex(ss.str());
}

std::string dumpJson(const Json& doc) { return doc.dump(2) + "\n"; }

OutputSet::OutputSet(std::filesystem::path dir, const RunConfig& config)
    : dir_(std::move(dir)), config_(config) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir_.string() + "'");
}

std::filesystem::path OutputSet::pathFor(const std::string& suffix) const {
  return dir_ / (config_.command() + "-" + config_.slug() + suffix);
}

void OutputSet::write(const std::string& suffix, const std::string& bytes) {
  const auto path = pathFor(suffix);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << bytes;
  out.close();
  if (!out) throw UsageError("failed writing '" + path.string() + "'");
  files_.push_back(path);
}

void OutputSet::writeJson(const std::string& suffix, const Json& doc) { write(suffix, dumpJson(doc)); }

std::filesystem::path OutputSet::writeManifest(const Json& summary, double wallSeconds,
                                               int threads) {
  Json m;
  m["command"] = config_.command();
  m["config"] = Json::object();
  for (const auto& [k, v] : config_.values()) m["config"][k] = v;
  m["slug"] = config_.slug();
  m["version"] = ABC_ORBITS_VERSION;
  m["wall_time_seconds"] = wallSeconds;
  m["threads"] = threads;
  m["summary"] = summary;
  m["outputs"] = Json::array();
  for (const auto& f : files_) {
    m["outputs"].push_back({{"file", f.filename().string()},
                            {"bytes", std::filesystem::file_size(f)},
                            {"sha256", sha256File(f)}});
  }
  const auto path = pathFor(".manifest.json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << dumpJson(m);
  return path;
}

}  // namespace abc::cli
