#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace homog::cli {

// flag-level overrides applied after the config document is parsed; the
// fully-resolved values are what run.json echoes
struct overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<long> realizations;  // rescales every ensemble in the command
};

// embedded preset documents; the files under presets/ carry the same text
// and a test keeps the two in sync
std::vector<std::string> preset_names();
const std::string& preset_text(const std::string& name);  // throws invalid_argument

// one command against one config document. config_text is strict JSON with
// comments allowed: unknown keys anywhere are errors, and a document whose
// top level holds a "config" object is unwrapped first (so a previous run's
// run.json can be fed back verbatim). Outputs land under out_dir, which is
// created if missing. Returns the process exit code: 0 success, 2 config
// error, 3 estimator quality flag, 4 realization-failure threshold exceeded.
int run_command(const std::string& command, const std::string& config_text,
                const overrides& ov, const std::string& out_dir, std::ostream& out,
                std::ostream& err);

// argv-level entry used by the binary: subcommands sigma, compare, moments,
// levy; flags --config PATH (path, preset name, or previous run.json),
// --seed U64, --workers N, --realizations N, --out DIR
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homog::cli
