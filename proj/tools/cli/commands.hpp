#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace abc::cli {

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionDef> options;
};

// Every subcommand with its options and defaults. All of them also accept
// output-dir.
const std::vector<CommandSpec>& commandSpecs();
const CommandSpec& commandSpec(const std::string& name);

struct CommandResult {
  Json summary;
  std::vector<std::filesystem::path> files;  // data files, manifest excluded
  std::filesystem::path manifest;
};

// Executes a resolved command and writes its outputs, then the manifest.
CommandResult runCommand(const RunConfig& config, int threads);

// Full command-line entry point. Exit codes: 0 success, 1 computation
// error, 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace abc::cli
