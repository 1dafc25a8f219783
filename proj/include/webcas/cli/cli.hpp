#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace webcas::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDenied = 2, kInvalid = 3, kIo = 4 };

/// Runs one command line (without the program name). Machine output goes to
/// `out`, messages to `err`; `in` feeds `--file -`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace webcas::cli
