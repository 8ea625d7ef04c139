#pragma once

namespace wasabi {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInvariant = 3 };

/// Entry point of the `wasabi` command-line tool; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace wasabi
