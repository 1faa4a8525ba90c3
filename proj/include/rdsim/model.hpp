#pragma once
// Physical description of the driven Rabi dimer and its sub-Ohmic bath.
//
// Two resonators (left/right, frequencies omega_L/omega_R) each couple to a
// qubit with strength g; the resonators exchange photons with tunneling J; the
// qubit splittings are driven harmonically, Delta_i(t) = A_i cos(Omega_i t +
// Phi_i); and a common bosonic bath with spectral density
//   J(w) = 2 alpha omega_c^(1-s) w^s exp(-w/omega_c)
// couples to sigma_z of both qubits.  The continuous bath is represented by
// n_modes discrete oscillators obtained from a logarithmic partition of
// [omega_min, omega_max]; each mode carries the integrated spectral weight of
// its bin (phi_k^2 = int_bin J dw) and sits at the coupling-weighted mean
// frequency of the bin, so the low-frequency end keeps its dense sampling.

#include <vector>

namespace rdsim {

// Harmonic qubit driving Delta(t) = amplitude * cos(frequency * t + phase).
struct DrivingField {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;

  double value(double t) const;
};

// Continuous-bath parameters plus the discretization size.
struct BathSpec {
  double alpha = 0.0;      // dimensionless coupling strength
  double s = 0.5;          // spectral exponent (s < 1: sub-Ohmic)
  double omega_c = 1.0;    // cutoff frequency
  double omega_max = 20.0; // upper edge of the discretized band
  int n_modes = 0;

  // The logarithmic grid cannot reach zero; its lowest edge is
  // omega_min_factor * omega_c.
  double omega_min_factor = 1e-4;
};

// Discrete bath modes: frequencies, couplings, and the bin edges they came
// from (edges has n_modes + 1 entries, ascending).
struct DiscretizedBath {
  std::vector<double> omega;
  std::vector<double> phi;
  std::vector<double> edges;

  int size() const { return static_cast<int>(omega.size()); }
};

// Full system: symmetric-capable dimer parameters, per-site driving, bath.
struct ModelSpec {
  double omega_L = 1.0;
  double omega_R = 1.0;
  double g = 0.3;   // qubit-resonator coupling (both sites)
  double J = 0.05;  // photon tunneling between the resonators
  DrivingField drive_L;
  DrivingField drive_R;
  BathSpec bath;
};

// J(w) for w > 0, zero otherwise.
double spectral_density(const BathSpec& bath, double w);

// Logarithmic discretization of [omega_min_factor*omega_c, omega_max] into
// n_modes bins; phi_k^2 integrates J over bin k and omega_k is the
// J-weighted bin centroid.  Throws on invalid parameters.
DiscretizedBath discretize_bath(const BathSpec& bath);

// Discretization with hand-placed mode frequencies: bins split at the
// arithmetic midpoints between consecutive centers, with the outer edges at
// the usual grid bounds.  Mode frequencies keep the requested values.
DiscretizedBath discretize_bath_at(const BathSpec& bath, const std::vector<double>& centers);

// Parameter sanity checks shared by every entry point; throws std::runtime_error.
void validate(const ModelSpec& model);

}  // namespace rdsim
