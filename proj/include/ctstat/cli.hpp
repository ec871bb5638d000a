#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

#include "json.hpp"

namespace ctstat::cli {

enum class OutputFormat { Csv, Json };

/// Fully resolved invocation.  `parameters` holds every subcommand flag,
/// defaults included, and is echoed into the output header.
struct RunConfig {
  std::string subcommand;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::uint64_t seed = 42;
  std::string output_path = "-";
  OutputFormat format = OutputFormat::Csv;
  int threads = 1;

  nlohmann::ordered_json to_json() const;
};

enum ExitCode : int { kSuccess = 0, kDomain = 2, kNumeric = 3, kIo = 4 };

/// Parses argv.  Returns the config, or an exit code when parsing ended the
/// run (help text, unknown flags, malformed values).
std::variant<RunConfig, int> parse_arguments(int argc, const char* const* argv, std::ostream& out,
                                             std::ostream& err);

/// Executes a config, writing to config.output_path ("-" is `out`).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_arguments followed by run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctstat::cli
