#pragma once

#include "spectral_lab/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace spectral_lab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapped = 3;

// Runs one command (dos, lyapunov, thouless, construct, walters) into `out`,
// writing config.json first. Returns an exit code.
int run_command(const std::string& command, const RunConfig& cfg, const std::filesystem::path& out);

// Re-reads every known output file in a run directory and checks its schema.
// Returns one message per problem; empty means valid.
std::vector<std::string> validate_run_dir(const std::filesystem::path& dir);

// spectral_lab <command> [--config file] [--out dir] [--threads n] [--a.b value ...]
// spectral_lab --validate <dir>
int run_cli(int argc, char** argv);

}  // namespace spectral_lab
