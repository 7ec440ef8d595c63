#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cos2q {

inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;

/// Environment variable naming the default output root.
inline constexpr const char* output_root_variable = "COS2Q_OUT_DIR";

/// Runs one subcommand. args[0] is the program name. Success prints a JSON
/// summary to `out`; failure prints an error JSON to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cos2q
