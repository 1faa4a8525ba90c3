#include "rdsim/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rdsim/dynamics.hpp"
#include "rdsim/observables.hpp"
#include "rdsim/oracle.hpp"

extern "C" void openblas_set_num_threads(int);

namespace rdsim {
namespace {

using nlohmann::json;

void ensure_parent_dirs(const std::string& stem) {
  const auto dir = std::filesystem::path(stem).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("ERROR: cannot write output file '" + path + "'");
  return f;
}

void write_trajectory(const std::string& path, const std::vector<ObservableRecord>& recs,
                      double J) {
  std::ofstream f = open_out(path);
  f << "t tJ N_L N_R Z N_tot sigz_L sigz_R norm energy\n";
  char buf[32];
  auto col = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.16e", v);
    f << buf << sep;
  };
  for (const auto& r : recs) {
    col(r.t, ' ');
    col(r.t * J, ' ');
    col(r.n_left, ' ');
    col(r.n_right, ' ');
    col(r.n_left - r.n_right, ' ');
    col(r.n_left + r.n_right, ' ');
    col(r.sigz_left, ' ');
    col(r.sigz_right, ' ');
    col(r.norm, ' ');
    col(r.energy, '\n');
  }
}

void write_bath_table(const std::string& path, const std::vector<ObservableRecord>& recs) {
  std::ofstream f = open_out(path);
  const auto n_modes = recs.empty() ? 0 : recs.front().bath_population.size();
  f << "t";
  for (Eigen::Index k = 0; k < n_modes; ++k) f << " n_" << (k + 1);
  f << "\n";
  char buf[32];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof buf, "%.16e", r.t);
    f << buf;
    for (Eigen::Index k = 0; k < n_modes; ++k) {
      std::snprintf(buf, sizeof buf, "%.16e", r.bath_population(k));
      f << " " << buf;
    }
    f << "\n";
  }
}

json stats_to_json(const StepStats& stats) {
  return json{{"solves", stats.solves},       {"steps", stats.steps},
              {"retries", stats.retries},     {"min_rank", stats.min_rank},
              {"max_condition", stats.max_condition},
              {"max_residual", stats.max_residual}};
}

}  // namespace

RunOutcome run_single(const RunConfig& config) {
  validate(config.model);
  ensure_parent_dirs(config.out);

  const bool oracle_mode = config.mode == "oracle";
  FockBasisSpec basis;
  basis.n_max_photon = config.n_max_photon;
  basis.n_max_bath = config.n_max_bath;
  basis.n_bath = config.model.bath.n_modes;
  basis.max_dim = config.oracle_max_dim;
  // Budget and cap validation happens before any propagation work.
  if (oracle_mode) fock_dimension(basis);

  const DiscretizedBath bath = discretize_bath(config.model.bath);

  std::vector<ObservableRecord> records;
  StepStats stats;
  bool aborted = false;
  std::string abort_reason;
  const auto tic = std::chrono::steady_clock::now();

  if (oracle_mode) {
    // The oracle starts from the exact product state (one branch, no noise).
    const MultiD2State product =
        initial_state(1, bath.size(), config.photons, 0.0, config.seed);
    const FockState initial = convert_ansatz_to_fock(product, basis);
    try {
      records = propagate_exact(initial, config.model, bath, basis, config.prop.t_max,
                                config.prop.dt, config.prop.sample_every);
    } catch (const std::runtime_error& err) {
      aborted = true;
      abort_reason = err.what();
    }
  } else {
    const MultiD2State initial = initial_state(config.m, bath.size(), config.photons,
                                               config.noise_scale, config.seed);
    PropagationResult res = propagate(config.model, bath, initial, config.prop);
    records = std::move(res.records);
    stats = res.stats;
    aborted = res.aborted;
    abort_reason = res.abort_reason;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
  const std::string suffix = aborted ? ".aborted" : "";

  RunOutcome outcome;
  outcome.aborted = aborted;
  outcome.abort_reason = abort_reason;
  outcome.trajectory_path = config.out + ".dat" + suffix;
  outcome.meta_path = config.out + ".meta.json" + suffix;
  write_trajectory(outcome.trajectory_path, records, config.model.J);
  if (bath.size() > 0) {
    outcome.bath_path = config.out + ".bath.dat" + suffix;
    write_bath_table(outcome.bath_path, records);
  }

  json meta{{"version", kVersion},
            {"mode", config.mode},
            {"oracle", oracle_mode},
            {"seed", config.seed},
            {"samples", records.size()},
            {"wall_time_s", wall},
            {"aborted", aborted},
            {"config_echo", echo_config(config)},
            {"trajectory", outcome.trajectory_path}};
  if (aborted) meta["abort_reason"] = abort_reason;
  if (oracle_mode)
    meta["fock_dimension"] = fock_dimension(basis);
  else
    meta["solver_stats"] = stats_to_json(stats);
  open_out(outcome.meta_path) << meta.dump(2) << "\n";
  return outcome;
}

int run_config(const RunConfig& config, int threads) {
  if (threads < 1) throw std::runtime_error("ERROR: threads must be >= 1");
  // Runs own their threads; keep the BLAS inside each solve single-threaded.
  openblas_set_num_threads(1);

  const std::vector<RunConfig> runs = expand_sweeps(config);
  if (config.sweeps.empty()) return run_single(runs.front()).aborted ? 2 : 0;

  std::vector<RunOutcome> outcomes(runs.size());
  std::vector<std::string> failures(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        outcomes[i] = run_single(runs[i]);
      } catch (const std::runtime_error& err) {
        failures[i] = err.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), runs.size());
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  bool all_clean = true;
  json entries = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    json entry{{"out", runs[i].out}};
    // Reconstruct this run's swept assignments (row-major, last block fastest).
    std::size_t rem = i;
    json keys;
    for (auto it = config.sweeps.rbegin(); it != config.sweeps.rend(); ++it) {
      keys[it->first] = it->second[rem % it->second.size()];
      rem /= it->second.size();
    }
    entry["keys"] = keys;
    if (!failures[i].empty()) {
      entry["failed"] = failures[i];
      all_clean = false;
    } else {
      entry["aborted"] = outcomes[i].aborted;
      entry["trajectory"] = outcomes[i].trajectory_path;
      if (outcomes[i].aborted) all_clean = false;
    }
    entries.push_back(std::move(entry));
  }

  ensure_parent_dirs(config.out + "/manifest.json");
  json manifest{{"version", kVersion},
                {"runs", entries},
                {"config_echo", echo_config(config)}};
  open_out(config.out + "/manifest.json") << manifest.dump(2) << "\n";
  return all_clean ? 0 : 2;
}

}  // namespace rdsim
