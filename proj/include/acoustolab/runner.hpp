#pragma once

// Command dispatch behind the CLI: loads a config, runs one command, writes
// CSV artifacts plus summary.json into the output directory.

#include <optional>
#include <string>

namespace acoustolab {

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;  // 0 = ACOUSTOLAB_WORKERS env / hardware concurrency
  // Verdict assertion: sweep takes bounded|unbounded, gcc takes
  // satisfied|violated|inconclusive.  A mismatch yields exit code 1.
  std::optional<std::string> expect;
};

// Commands: simulate, resolvent-sweep, quasimode, rays, gcc, husimi,
// dump-matrix.  Returns the process exit code (0 ok, 1 expectation failed);
// configuration and numerical errors propagate as exceptions (the CLI maps
// them to exit code 2).
int run_command(const std::string& command, const RunOptions& opts);

}  // namespace acoustolab
