#pragma once
// Minimum-norm least-squares solves with singular-value truncation.
//
// The tangent-space projector is rank-deficient whenever ansatz branches
// (nearly) coincide, so plain LU is not an option.  Every solve runs through
// an SVD-based routine that drops singular values below rcond * sigma_max and
// returns the minimum-norm solution, together with the effective rank, the
// retained condition number, and the actual residual norm.

#include <vector>

#include <Eigen/Dense>

namespace rdsim {

struct SolverReport {
  double residual = 0.0;   // ||A x - b||_2 of the returned solution
  int rank = 0;            // singular values kept
  double condition = 0.0;  // sigma_max / sigma_min over the kept values
};

// Reusable buffers (LAPACK work arrays and a copy of A for the residual) for
// repeated square solves of the same dimension.
class LstsqWorkspace {
 public:
  explicit LstsqWorkspace(int n);

  // Solves min ||A x - b|| for square A with the truncation rule above.
  // A and b are destroyed.
  Eigen::VectorXd solve(Eigen::MatrixXd& A, Eigen::VectorXd& b, double rcond,
                        SolverReport& report);

  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> work_;
  std::vector<int> iwork_;
  std::vector<double> sv_;
  Eigen::MatrixXd a_copy_;
  Eigen::VectorXd b_copy_;
};

}  // namespace rdsim
