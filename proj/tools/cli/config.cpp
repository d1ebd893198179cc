#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "output.hpp"

namespace abc::cli {

namespace {

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); });
  return b < e.base() ? std::string(b, e.base()) : std::string();
}

double parseReal(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError("option '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

KeyValues parseConfigText(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineNo) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw UsageError("config line " + std::to_string(lineNo) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

KeyValues loadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseConfigText(ss.str());
}

std::string RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("missing option '" + key + "'");
  return it->second;
}

double RunConfig::real(const std::string& key) const { return parseReal(key, str(key)); }

long RunConfig::integer(const std::string& key) const {
  const std::string t = trim(str(key));
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError("option '" + key + "' expects an integer, got '" + t + "'");
  }
  return v;
}

bool RunConfig::flag(const std::string& key) const {
  std::string t = trim(str(key));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off" || t.empty()) return false;
  throw UsageError("option '" + key + "' expects a boolean, got '" + t + "'");
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(str(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!trim(item).empty()) out.push_back(parseReal(key, item));
  }
  if (out.empty()) throw UsageError("option '" + key + "' expects a comma-separated list");
  return out;
}

std::string RunConfig::canonical() const {
  std::string out = "command=" + command_ + "\n";
  for (const auto& [k, v] : values_) {
    if (k == "threads" || k == "output-dir" || k == "config") continue;
    out += k + "=" + v + "\n";
  }
  return out;
}

std::string RunConfig::slug() const { return sha256Hex(canonical()).substr(0, 12); }

RunConfig resolveConfig(const std::string& command, const std::vector<OptionDef>& options,
                        const KeyValues& fileValues, const KeyValues& flagValues) {
  KeyValues merged;
  for (const OptionDef& o : options) {
    if (auto f = flagValues.find(o.key); f != flagValues.end()) {
      merged[o.key] = f->second;
    } else if (auto c = fileValues.find(o.key); c != fileValues.end()) {
      merged[o.key] = c->second;
    } else {
      merged[o.key] = o.defaultValue;
    }
  }
  return RunConfig(command, std::move(merged));
}

int resolveThreadCount(const std::optional<std::string>& flag, const KeyValues& fileValues) {
  auto parse = [](const std::string& source, const std::string& v) {
    const double d = parseReal(source, v);
    if (d < 0.0 || d != static_cast<double>(static_cast<int>(d))) {
      throw UsageError(source + " must be a non-negative integer");
    }
    return static_cast<int>(d);
  };
  if (flag) return parse("threads", *flag);
  if (const char* env = std::getenv("ABC_ORBITS_THREADS"); env && *env) {
    return parse("ABC_ORBITS_THREADS", env);
  }
  if (auto it = fileValues.find("threads"); it != fileValues.end()) {
    return parse("threads", it->second);
  }
  return 0;
}

}  // namespace abc::cli
