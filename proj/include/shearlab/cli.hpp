#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shearlab/config.hpp"

namespace shearlab::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kRunFailed = 3;

/// Environment variable overriding the output root (<root>/<subcommand>).
inline constexpr const char* kOutRootEnv = "SHEARLAB_OUT_ROOT";

/// --out wins; then $SHEARLAB_OUT_ROOT/<subcommand>; then ./shearlab_out/<subcommand>.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& out, Subcommand sub);

/// Runs a resolved config, writing every artifact into out.  Returns an exit code.
int execute(const RunConfig& cfg, const std::filesystem::path& out);

/// args excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace shearlab::cli
