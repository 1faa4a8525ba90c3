#pragma once
// Executes parsed configurations: one trajectory per run (variational engine
// or exact oracle, per the mode flag), sweeps on a worker pool, plain-text
// trajectory tables plus a JSON metadata sidecar, and a sweep manifest.

#include <string>

#include "rdsim/config.hpp"

namespace rdsim {

inline constexpr const char* kVersion = "1.0.0";

struct RunOutcome {
  bool aborted = false;
  std::string abort_reason;
  std::string trajectory_path;  // final name, ".aborted"-suffixed when aborted
  std::string bath_path;        // empty when the run carries no bath modes
  std::string meta_path;
};

// One trajectory.  Creates the output stem's parent directories, writes
// "<out>.dat" (+ "<out>.bath.dat" with one column per mode when N_bath > 0)
// and "<out>.meta.json"; an aborted run keeps its partial output under the
// ".aborted" suffix.
RunOutcome run_single(const RunConfig& config);

// Expands sweeps and executes every run on `threads` workers; a sweeping
// config additionally writes "<out>/manifest.json" once all runs finish.
// Returns 0 when every trajectory completed, 2 otherwise.
int run_config(const RunConfig& config, int threads);

}  // namespace rdsim
