#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scalespec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the directory that relative --output paths
/// are resolved against.
inline constexpr const char* kOutputDirEnv = "SCALESPEC_OUTPUT_DIR";

/// Runs one subcommand. `args` excludes the program name. Data goes to
/// `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace scalespec::cli
