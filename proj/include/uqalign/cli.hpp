#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace uqalign::cli {

/// Directory for output files when --output is not given. Falls back to
/// ./results when unset or empty.
inline constexpr const char* kOutputDirEnv = "UQALIGN_OUTPUT_DIR";

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kDataError = 3,
  kCheckFailed = 4,
};

/// Entry point; `args[0]` is the program name. Results go to files (or to
/// `out` with `--output -`); diagnostics are single lines on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Writes through a sibling temporary file and a rename, so readers never
/// observe a partial file. Creates missing parent directories.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace uqalign::cli
