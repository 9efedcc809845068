#pragma once

namespace qgvae::cli {

// Entry point for the `qgvae` binary. Exit codes: 0 success, 2 config or
// usage error, 3 I/O error, 4 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace qgvae::cli
