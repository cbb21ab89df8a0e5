#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "jclab/config.hpp"

namespace jclab {

/// Environment variable naming the default output directory.
inline constexpr const char* out_dir_env = "JCLAB_OUT_DIR";

enum ExitCode : int { exit_pass = 0, exit_verification = 1, exit_config = 2 };

/// Entry point of the command-line tool:
///   jclab {verify-algebra|propagate|berry|coherent} --config <path> [--out <dir>] [--jobs N]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_verify_algebra(const ScenarioConfig& config, const std::filesystem::path& out_dir, std::ostream& out);
int run_propagate(const ScenarioConfig& config, const std::filesystem::path& out_dir, unsigned jobs,
                  std::ostream& out);
int run_berry(const ScenarioConfig& config, const std::filesystem::path& out_dir, unsigned jobs, std::ostream& out);
int run_coherent(const ScenarioConfig& config, const std::filesystem::path& out_dir, unsigned jobs,
                 std::ostream& out);

}  // namespace jclab
