#pragma once
// Run configuration: a flat key = value document with repeatable single-line
// sweep blocks,
//
//   # paper baseline, driven left site
//   A_L = 10.0
//   Omega_L = 0.5
//   sweep photons { 10 20 40 }
//
// Unknown keys, malformed values, and out-of-range parameters are rejected
// with the key name and the line they came from.  Defaults reproduce the
// baseline parameter set, so an empty document is a complete run description.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdsim/dynamics.hpp"
#include "rdsim/model.hpp"

namespace rdsim {

struct RunConfig {
  // An empty document is the baseline: 20 photons on the left resonator,
  // M = 6, a 60-mode sub-Ohmic bath at alpha = 0.1, no driving, tJ up to 15.
  RunConfig() {
    model.bath.alpha = 0.1;
    model.bath.n_modes = 60;
    prop.t_max = 300.0;
  }

  ModelSpec model;
  int m = 6;                // ansatz multiplicity
  double photons = 20.0;    // initial photons in the left resonator
  double noise_scale = 1e-3;
  std::uint64_t seed = 1;
  PropagationOptions prop;  // dt, t_max, sample_every, rcond, norm_tol, checkpoints
  std::string out = "run";  // output path stem
  std::string mode = "variational";  // "variational" | "oracle"

  // Truncated-basis settings used when mode = oracle.
  int n_max_photon = 14;
  int n_max_bath = 4;
  std::size_t oracle_max_dim = 2000000;

  // Sweep blocks in declaration order: key plus the raw value list.
  std::vector<std::pair<std::string, std::vector<std::string>>> sweeps;
};

// Parse a configuration document / file into a validated RunConfig.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Assign one key (command-line --set or sweep expansion); `where` names the
// source in error messages.
void apply_override(RunConfig& config, const std::string& key, const std::string& value,
                    const std::string& where);

// Cartesian product of every sweep block; each run gets out = "<out>/run_NNN"
// and its swept keys applied.  A sweep-free config expands to itself.
std::vector<RunConfig> expand_sweeps(const RunConfig& config);

// Canonical document listing every key explicitly at full precision;
// re-parsing it reproduces the configuration.
std::string echo_config(const RunConfig& config);

}  // namespace rdsim
