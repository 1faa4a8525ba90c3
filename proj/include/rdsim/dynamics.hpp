#pragma once
// Time-dependent variational propagation of the ansatz.
//
// The variational principle turns the Schroedinger equation into a linear
// system for the parameter velocities at each instant: for every bra
// parameter q_r the projected equation reads
//
//   sum_c ( L[r,c] udot_c + K[r,c] conj(udot_c) ) = r_r,
//
// where L and K contain branch overlaps and the conjugate couplings that the
// coherent-state normalization terms introduce.  Because conj(udot) appears,
// the complex system is recast over real and imaginary parts as independent
// unknowns, doubling the dimension to P = 2 m (6 + n_bath).  Near-degenerate
// branches make the system rank-deficient by construction, so each solve uses
// the truncated-SVD minimum-norm route and reports rank and conditioning.
// Time stepping is classic fourth-order Runge-Kutta on the resulting
// parameter velocity field.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdsim/ansatz.hpp"
#include "rdsim/lstsq.hpp"
#include "rdsim/model.hpp"
#include "rdsim/observables.hpp"

namespace rdsim {

// Parameter velocities in the field-major packing of MultiD2State::flatten.
struct TangentVector {
  Eigen::VectorXcd udot;
};

// Complex tangent equations: L udot + K conj(udot) = r.
struct EomSystem {
  Eigen::MatrixXcd L;
  Eigen::MatrixXcd K;
  Eigen::VectorXcd r;
};

// Aggregate solver health over one or many steps.
struct StepStats {
  long long solves = 0;
  long long steps = 0;
  long long retries = 0;
  int min_rank = 0;
  double max_condition = 0.0;
  double max_residual = 0.0;

  void absorb(const SolverReport& report);
  void merge(const StepStats& other);
};

struct PropagationOptions {
  double dt = 2.5e-3;
  double t_max = 1.0;
  int sample_every = 10;      // record observables every this many steps
  double rcond = 1e-10;
  double norm_tol = 1e-3;     // |norm(t) - norm(0)| beyond this aborts the run
  int checkpoint_every = 0;   // steps between checkpoints; 0 = only on abort
  std::string checkpoint_path;  // empty disables checkpoint writing entirely
};

struct PropagationResult {
  std::vector<ObservableRecord> records;
  MultiD2State final_state;
  StepStats stats;
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;
};

// Build the tangent equations at time t from cached overlap tables.
EomSystem assemble_eom(const MultiD2State& state, const OverlapTables& tab,
                       const ModelSpec& model, const DiscretizedBath& bath, double t);

// Minimum-norm solve of the doubled real system with truncation threshold
// rcond * sigma_max.
TangentVector solve_tangent(const EomSystem& sys, double rcond, SolverReport& report);

// One RK4 step of size dt starting at time t; stats accumulates the four
// stage solves.
MultiD2State rk4_step(const ModelSpec& model, const DiscretizedBath& bath,
                      const MultiD2State& state, double t, double dt, double rcond,
                      StepStats& stats);

// Fixed-step propagation with observable sampling, a norm guard (one halved
// retry, then abort with a checkpoint of the last good state), and optional
// periodic checkpoints.  The run covers round(t_max / dt) steps.
PropagationResult propagate(const ModelSpec& model, const DiscretizedBath& bath,
                            const MultiD2State& initial, const PropagationOptions& options);

}  // namespace rdsim
