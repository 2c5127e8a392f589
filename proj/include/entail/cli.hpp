#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entail::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kDataError = 3,
    kTransportError = 4,
};

/// Entry point of the `entail` tool. Subcommands: gen, score, tune, predict,
/// ensemble, eval, report. Failures print one JSON line
/// `{"error":<kind>,"message":<text>}` to `err` and return the matching code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same as above; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entail::cli
