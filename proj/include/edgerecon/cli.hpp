#pragma once

#include <string>
#include <vector>

namespace edgerecon::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       // anything not covered below
  kUsage = 2,         // bad flags or config values
  kIo = 3,            // missing or unwritable file
  kEmptyMesh = 4,     // reconstruction produced no faces
  kBadData = 5,       // malformed or degenerate input data
  kDiverged = 6,      // training loss became non-finite
};

// Subcommands: gen-data, train, reconstruct, eval, pipeline, sweep.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace edgerecon::cli
