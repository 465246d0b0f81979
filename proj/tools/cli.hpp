#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smap::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Entry point behind the `smap` executable. args excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

}  // namespace smap::cli
