#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsint {

/// rsint run <config> [--output-dir D] [--paths-override N] [--seed-override S] [--threads T]
/// rsint path --hurst H --intervals N [--horizon T] [--seed S] [--method circulant|cholesky] [--output F]
int cli_main(int argc, char** argv);
/// Same, with the program name omitted and explicit streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsint
