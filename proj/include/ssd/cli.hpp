#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ssd/designer.hpp"

namespace ssd::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitDivergence = 3,
  kExitDiagnostic = 4,
};

// Where a resolved setting came from, lowest precedence first.
enum class Source { kDefault, kConfig, kEnv, kCommandLine };

const char* to_string(Source source);

struct Setting {
  std::string value;
  Source source = Source::kDefault;
};

using Settings = std::map<std::string, Setting>;

// Every key `subcommand` accepts, with its default. Throws kInvalidParameter
// for an unknown subcommand.
const std::map<std::string, std::string>& known_keys(const std::string& subcommand);

// Defaults, then the config file (top-level keys, then the [subcommand]
// section), then SSD_<KEY> environment variables, then `overrides`.
Settings resolve_settings(const std::string& subcommand, const std::string& config_text,
                          const std::map<std::string, std::string>& env,
                          const std::map<std::string, std::string>& overrides);

DesignConfig design_config_from(const Settings& settings);

// Columns iter,f,d_phi,d_g,eta,halvings; one row per iteration.
std::string trace_to_csv(const std::vector<TraceRecord>& trace);

// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env);

// SSD_* variables of the current process.
std::map<std::string, std::string> process_environment();

}  // namespace ssd::cli
