#pragma once

namespace cda::cli {

/// Entry point of the `cdasim` tool.
/// Exit codes: 0 success, 1 configuration or usage error, 2 I/O error.
int cli_main(int argc, const char* const* argv);

}  // namespace cda::cli
