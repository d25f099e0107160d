#pragma once

// The `sear` command line: build-roles, simulate, analyze-survey, serve, anonymize.

#include <iosfwd>
#include <string>
#include <vector>

namespace sear::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kRuntimeError = 2 };

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, Streams io);

/// Maps a caught exception onto the exit-code contract.
int exit_code_for(const std::exception& e);

}  // namespace sear::cli
