#include "rdsim/lstsq.hpp"

#include <lapacke.h>

#include <stdexcept>
#include <string>

namespace rdsim {

static_assert(sizeof(lapack_int) == sizeof(int), "expected 32-bit LAPACK integers");

LstsqWorkspace::LstsqWorkspace(int n) : n_(n) {
  if (n < 1) throw std::runtime_error("ERROR: least-squares dimension must be >= 1");
  sv_.resize(n);
  a_copy_.resize(n, n);
  b_copy_.resize(n);

  // Workspace query
  double wkopt = 0.0;
  lapack_int iwkopt = 0;
  lapack_int rank = 0;
  lapack_int info = LAPACKE_dgelsd_work(LAPACK_COL_MAJOR, n, n, 1, a_copy_.data(), n,
                                        b_copy_.data(), n, sv_.data(), -1.0, &rank, &wkopt,
                                        -1, &iwkopt);
  if (info != 0)
    throw std::runtime_error("ERROR: dgelsd workspace query failed with info " +
                             std::to_string(info));
  work_.resize(static_cast<std::size_t>(wkopt) + 1);
  iwork_.resize(static_cast<std::size_t>(iwkopt) + 1);
}

Eigen::VectorXd LstsqWorkspace::solve(Eigen::MatrixXd& A, Eigen::VectorXd& b, double rcond,
                                      SolverReport& report) {
  if (A.rows() != n_ || A.cols() != n_ || b.size() != n_)
    throw std::runtime_error("ERROR: least-squares workspace dimension mismatch");

  a_copy_ = A;
  b_copy_ = b;

  lapack_int rank = 0;
  const lapack_int info = LAPACKE_dgelsd_work(
      LAPACK_COL_MAJOR, n_, n_, 1, A.data(), n_, b.data(), n_, sv_.data(), rcond, &rank,
      work_.data(), static_cast<lapack_int>(work_.size()), iwork_.data());
  if (info != 0)
    throw std::runtime_error("ERROR: dgelsd failed with info " + std::to_string(info));

  Eigen::VectorXd x = b;  // dgelsd leaves the solution in b
  report.rank = rank;
  report.condition = (rank > 0 && sv_[rank - 1] > 0.0) ? sv_[0] / sv_[rank - 1] : 0.0;
  report.residual = (a_copy_ * x - b_copy_).norm();
  return x;
}

}  // namespace rdsim
