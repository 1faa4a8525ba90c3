#pragma once
// Expectation values over the ansatz: photon numbers, qubit polarizations,
// per-mode bath occupations, norm, and total energy.
//
// Every observable here is an expectation of a Hermitian operator, so its
// double sum over branch pairs must come out real; a nonzero imaginary part
// beyond rounding signals an assembly bug, and evaluation treats it as fatal.

#include <Eigen/Dense>

#include "rdsim/ansatz.hpp"
#include "rdsim/model.hpp"

namespace rdsim {

struct ObservableRecord {
  double t = 0.0;
  double n_left = 0.0;    // left resonator photon number
  double n_right = 0.0;   // right resonator photon number
  double sigz_left = 0.0; // qubit polarizations <sigma_z>
  double sigz_right = 0.0;
  double norm = 0.0;      // <psi|psi>
  double energy = 0.0;    // <psi|H(t)|psi>
  Eigen::VectorXd bath_population;  // per-mode occupation, n_bath entries
};

// Largest imaginary residue tolerated on a Hermitian expectation value before
// evaluation aborts.
inline constexpr double kImagResidueTol = 1e-9;

std::pair<double, double> photon_numbers(const MultiD2State& state, const OverlapTables& tab);
std::pair<double, double> qubit_polarizations(const OverlapTables& tab);
Eigen::VectorXd bath_populations(const MultiD2State& state, const OverlapTables& tab);
double norm_value(const OverlapTables& tab);
double energy(const MultiD2State& state, const OverlapTables& tab, const ModelSpec& model,
              double t);

// General matrix element <bra| H(t) |ket> between two ansatz states; the
// diagonal case reproduces energy().  Used directly by validation tests.
cplx braket_h(const MultiD2State& bra, const MultiD2State& ket, const ModelSpec& model,
              const DiscretizedBath& bath, double t);

// All of the above at once on a freshly built table set.
ObservableRecord evaluate(const MultiD2State& state, const ModelSpec& model,
                          const DiscretizedBath& bath, double t);

}  // namespace rdsim
