#pragma once
// Multi-configuration coherent-state ansatz for the dimer + bath wavefunction.
//
// Each of the m branches carries four qubit amplitudes (on |uu>, |ud>, |du>,
// |dd>), one coherent displacement per resonator (mu, nu), and one per bath
// mode (eta).  Branch overlaps are products of coherent-state overlaps; the
// tables built here cache every pairwise quantity the equations of motion and
// the observables need.

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rdsim/model.hpp"

namespace rdsim {

using cplx = std::complex<double>;
// Row-major so each branch's bath displacements are contiguous for the kernels.
using EtaMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MultiD2State {
  int m = 0;       // number of branches
  int n_bath = 0;  // bath modes per branch

  Eigen::VectorXcd A, B, C, D;  // qubit amplitudes per branch
  Eigen::VectorXcd mu, nu;      // left/right resonator displacements
  EtaMatrix eta;                // m x n_bath bath displacements

  MultiD2State() = default;
  MultiD2State(int m_, int n_bath_);

  // Number of complex parameters, m * (6 + n_bath).
  int dim() const { return m * (6 + n_bath); }

  // Field-major packing [A; B; C; D; mu; nu; eta(branch 1), eta(branch 2), ...]
  // used by the integrator and the checkpoint format.
  Eigen::VectorXcd flatten() const;
  void unflatten(const Eigen::VectorXcd& v);

  const cplx* eta_row(int n) const { return eta.row(n).data(); }
  cplx* eta_row(int n) { return eta.row(n).data(); }
};

// Pairwise branch quantities, all indexed (l, n) = (bra, ket).
struct OverlapTables {
  Eigen::MatrixXcd S;        // Gaussian overlap of the displacement sets
  Eigen::MatrixXcd theta_a;  // conj(A_l)A_n + conj(B_l)B_n + conj(C_l)C_n + conj(D_l)D_n
  Eigen::MatrixXcd theta_b;  // conj(A_l)A_n + conj(B_l)B_n - conj(C_l)C_n - conj(D_l)D_n
  Eigen::MatrixXcd theta_c;  // conj(A_l)A_n - conj(B_l)B_n + conj(C_l)C_n - conj(D_l)D_n
  Eigen::MatrixXcd theta_d;  // conj(A_l)C_n + conj(B_l)D_n + conj(C_l)A_n + conj(D_l)B_n
  Eigen::MatrixXcd theta_e;  // conj(A_l)B_n + conj(B_l)A_n + conj(C_l)D_n + conj(D_l)C_n
  Eigen::MatrixXcd pi_bath;  // bath single-particle energy sum_k w_k eta_lk^* eta_nk
  Eigen::MatrixXcd w;        // bath displacement sum: sum_k phi_k (eta_lk^* + eta_nk)
  Eigen::MatrixXcd mu_sum;   // mu_l^* + mu_n
  Eigen::MatrixXcd nu_sum;   // nu_l^* + nu_n
  Eigen::VectorXcd phi_eta;  // per-branch sum_k phi_k eta_nk
  Eigen::VectorXd abs2_eta;  // per-branch sum_k |eta_nk|^2
};

// Overlap of two coherent displacement vectors,
//   exp( sum_i a_i^* b_i - |a_i|^2 / 2 - |b_i|^2 / 2 ).
cplx debye_waller(const cplx* a, const cplx* b, std::size_t n);

// Full inner product <bra|ket> of two ansatz states (must share n_bath).
cplx braket(const MultiD2State& bra, const MultiD2State& ket);

// Cache every pairwise table for the current state; the discretized bath
// supplies the frequencies and couplings entering pi_bath and w.
OverlapTables build_overlap_tables(const MultiD2State& state, const DiscretizedBath& bath);

// Branch 1 holds the product state |photons on the left resonator> x |down,
// down> x vacuum; the remaining branches start empty except for a complex
// Gaussian displacement jitter of the given scale (E|z|^2 = scale^2) that
// breaks their degeneracy so the variational solver can populate them.
// Amplitudes and mu_1 = sqrt(photons) stay exact.
MultiD2State initial_state(int m, int n_bath, double photons, double noise_scale,
                           std::uint64_t seed);

// One-line text checkpoint: time followed by Re/Im pairs of the flattened
// parameters at full precision.
void write_checkpoint(const std::string& path, double t, const MultiD2State& state);
std::pair<double, MultiD2State> read_checkpoint(const std::string& path, int m, int n_bath);

}  // namespace rdsim
