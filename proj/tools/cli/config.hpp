#pragma once

// Flat key=value run configuration. Values are resolved in the order
// command-line flag > config file > built-in default; the worker count also
// honors ABC_ORBITS_THREADS between the flag and the config file.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace abc::cli {

// Bad flags, unreadable config files, unparsable values. Exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

// Parses `key = value` lines; blank lines and lines starting with '#' are
// ignored, as is anything after an unquoted '#'. Throws UsageError on a line
// without '='.
KeyValues parseConfigText(const std::string& text);
KeyValues loadConfigFile(const std::string& path);

struct OptionDef {
  std::string key;
  std::string defaultValue;
  std::string help;
};

class RunConfig {
 public:
  RunConfig() = default;
  RunConfig(std::string command, KeyValues values) : command_(std::move(command)), values_(std::move(values)) {}

  const std::string& command() const { return command_; }
  const KeyValues& values() const { return values_; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string str(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  // Comma-separated reals.
  std::vector<double> reals(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  // Sorted key=value lines, excluding keys that do not affect results
  // (threads, output-dir, config).
  std::string canonical() const;
  // First 12 hex digits of the SHA-256 of canonical().
  std::string slug() const;

 private:
  std::string command_;
  KeyValues values_;
};

// Merges defaults, the config file and explicitly given flags.
RunConfig resolveConfig(const std::string& command, const std::vector<OptionDef>& options,
                        const KeyValues& fileValues, const KeyValues& flagValues);

// Worker count: flag > ABC_ORBITS_THREADS > config file > hardware (0).
int resolveThreadCount(const std::optional<std::string>& flag, const KeyValues& fileValues);

}  // namespace abc::cli
