#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qtrap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad arguments or I/O failure
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point behind the qtrap executable; args excludes the program name.
///
///   qtrap run <scenario.json|preset> [--out DIR] [--mode exact|paper] [--threads N] [--dump-coupling]
///   qtrap presets list
///   qtrap presets show <name>
///
/// Output directory: --out, else $QTRAP_OUT, else the scenario's output_dir,
/// else ./qtrap_out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtrap::cli
