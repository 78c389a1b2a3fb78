#pragma once

#include <ostream>
#include <span>
#include <string>

namespace stripid::cli {

/// Stable exit-code contract of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kDataShape = 4,
  kModelMismatch = 5,
};

/// Runs one command line (without the program name), e.g.
/// {"extract", "--method", "cepstrum", ...}. Never throws.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace stripid::cli
