#pragma once
// Exact reference propagation in a truncated product Fock basis.
//
// Small instances of the full Hamiltonian are represented exactly (up to
// photon/phonon number cutoffs) on the basis |q> x |n_L> x |n_R> x |m_1 ...>,
// with the qubit pair index q running over (uu, ud, du, dd).  The Schroedinger
// equation is integrated directly with RK4, giving ground-truth trajectories
// against which the variational engine is validated.  Instance sizes are
// deliberately capped: this module exists for validation, not production runs.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rdsim/ansatz.hpp"
#include "rdsim/model.hpp"
#include "rdsim/observables.hpp"

namespace rdsim {

struct FockBasisSpec {
  int n_max_photon = 14;  // photon cutoff per resonator
  int n_max_bath = 4;     // occupation cutoff per bath mode
  int n_bath = 0;         // bath modes carried by the oracle basis
  std::size_t max_dim = 2000000;  // dense-vector budget
};

// Hard instance caps; beyond them the dense propagation stops being "small".
inline constexpr int kMaxOraclePhotonCutoff = 14;
inline constexpr int kMaxOracleBathCutoff = 4;
inline constexpr int kMaxOracleBathModes = 3;

// Norm drift beyond this aborts an oracle run: the reference itself would no
// longer be trustworthy.
inline constexpr double kOracleNormTol = 1e-6;

// Largest per-mode coherent weight allowed to fall above a cutoff when
// converting an ansatz into the truncated basis.
inline constexpr double kOracleTailTol = 1e-8;

struct FockState {
  Eigen::VectorXcd amplitudes;
};

// Validates the caps and the budget, then returns
// 4 (n_max_photon+1)^2 (n_max_bath+1)^n_bath.
std::size_t fock_dimension(const FockBasisSpec& spec);

// Full H(t) as a sparse operator on the truncated basis, driving included.
Eigen::SparseMatrix<cplx> build_hamiltonian(const ModelSpec& model,
                                            const DiscretizedBath& bath,
                                            const FockBasisSpec& spec, double t);

// Expands every coherent factor over number states and sums the branches.
// Throws if any factor leaves more than kOracleTailTol of weight above its
// cutoff.
FockState convert_ansatz_to_fock(const MultiD2State& state, const FockBasisSpec& spec);

// The ObservableRecord schema of the variational engine, evaluated exactly.
ObservableRecord fock_observables(const FockState& state, const ModelSpec& model,
                                  const DiscretizedBath& bath, const FockBasisSpec& spec,
                                  double t);

// RK4 on the Schroedinger equation with the time-dependent driving diagonal;
// samples at step 0, every sample_every-th step, and the final step.
std::vector<ObservableRecord> propagate_exact(const FockState& initial,
                                              const ModelSpec& model,
                                              const DiscretizedBath& bath,
                                              const FockBasisSpec& spec, double t_max,
                                              double dt, int sample_every = 1);

}  // namespace rdsim
