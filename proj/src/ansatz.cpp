#include "rdsim/ansatz.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "rdsim/kernels.hpp"

namespace rdsim {

MultiD2State::MultiD2State(int m_, int n_bath_) : m(m_), n_bath(n_bath_) {
  if (m < 1) throw std::runtime_error("ERROR: ansatz needs at least one branch");
  if (n_bath < 0) throw std::runtime_error("ERROR: negative bath size");
  A = Eigen::VectorXcd::Zero(m);
  B = Eigen::VectorXcd::Zero(m);
  C = Eigen::VectorXcd::Zero(m);
  D = Eigen::VectorXcd::Zero(m);
  mu = Eigen::VectorXcd::Zero(m);
  nu = Eigen::VectorXcd::Zero(m);
  eta = EtaMatrix::Zero(m, n_bath);
}

Eigen::VectorXcd MultiD2State::flatten() const {
  Eigen::VectorXcd v(dim());
  v.segment(0, m) = A;
  v.segment(m, m) = B;
  v.segment(2 * m, m) = C;
  v.segment(3 * m, m) = D;
  v.segment(4 * m, m) = mu;
  v.segment(5 * m, m) = nu;
  for (int n = 0; n < m; ++n)
    for (int k = 0; k < n_bath; ++k) v(6 * m + n * n_bath + k) = eta(n, k);
  return v;
}

void MultiD2State::unflatten(const Eigen::VectorXcd& v) {
  if (v.size() != dim())
    throw std::runtime_error("ERROR: parameter vector length does not match the ansatz");
  A = v.segment(0, m);
  B = v.segment(m, m);
  C = v.segment(2 * m, m);
  D = v.segment(3 * m, m);
  mu = v.segment(4 * m, m);
  nu = v.segment(5 * m, m);
  for (int n = 0; n < m; ++n)
    for (int k = 0; k < n_bath; ++k) eta(n, k) = v(6 * m + n * n_bath + k);
}

cplx debye_waller(const cplx* a, const cplx* b, std::size_t n) {
  const auto& ops = kernels::active();
  const cplx cross = ops.cdotc(a, b, n);
  const double na = ops.sum_abs2(a, n);
  const double nb = ops.sum_abs2(b, n);
  return std::exp(cross - 0.5 * (na + nb));
}

cplx braket(const MultiD2State& bra, const MultiD2State& ket) {
  if (bra.n_bath != ket.n_bath)
    throw std::runtime_error("ERROR: braket needs matching bath sizes");
  cplx acc{0.0, 0.0};
  for (int l = 0; l < bra.m; ++l) {
    for (int n = 0; n < ket.m; ++n) {
      const cplx amp = std::conj(bra.A(l)) * ket.A(n) + std::conj(bra.B(l)) * ket.B(n) +
                       std::conj(bra.C(l)) * ket.C(n) + std::conj(bra.D(l)) * ket.D(n);
      if (amp == cplx{0.0, 0.0}) continue;
      cplx ov = debye_waller(&bra.mu(l), &ket.mu(n), 1) * debye_waller(&bra.nu(l), &ket.nu(n), 1);
      if (bra.n_bath > 0)
        ov *= debye_waller(bra.eta_row(l), ket.eta_row(n), static_cast<std::size_t>(bra.n_bath));
      acc += amp * ov;
    }
  }
  return acc;
}

OverlapTables build_overlap_tables(const MultiD2State& state, const DiscretizedBath& bath) {
  if (state.n_bath != bath.size())
    throw std::runtime_error("ERROR: state and discretized bath disagree on the mode count");
  const auto& ops = kernels::active();
  const int m = state.m;
  const auto K = static_cast<std::size_t>(state.n_bath);

  OverlapTables tab;
  tab.S.resize(m, m);
  tab.theta_a.resize(m, m);
  tab.theta_b.resize(m, m);
  tab.theta_c.resize(m, m);
  tab.theta_d.resize(m, m);
  tab.theta_e.resize(m, m);
  tab.pi_bath.resize(m, m);
  tab.w.resize(m, m);
  tab.mu_sum.resize(m, m);
  tab.nu_sum.resize(m, m);
  tab.phi_eta = Eigen::VectorXcd::Zero(m);
  tab.abs2_eta = Eigen::VectorXd::Zero(m);

  for (int n = 0; n < m; ++n) {
    if (K > 0) {
      tab.phi_eta(n) = ops.cdot_rw(bath.phi.data(), state.eta_row(n), K);
      tab.abs2_eta(n) = ops.sum_abs2(state.eta_row(n), K);
    }
  }

  for (int l = 0; l < m; ++l) {
    for (int n = 0; n < m; ++n) {
      const cplx cAl = std::conj(state.A(l)), cBl = std::conj(state.B(l));
      const cplx cCl = std::conj(state.C(l)), cDl = std::conj(state.D(l));
      tab.theta_a(l, n) = cAl * state.A(n) + cBl * state.B(n) + cCl * state.C(n) + cDl * state.D(n);
      tab.theta_b(l, n) = cAl * state.A(n) + cBl * state.B(n) - cCl * state.C(n) - cDl * state.D(n);
      tab.theta_c(l, n) = cAl * state.A(n) - cBl * state.B(n) + cCl * state.C(n) - cDl * state.D(n);
      tab.theta_d(l, n) = cAl * state.C(n) + cBl * state.D(n) + cCl * state.A(n) + cDl * state.B(n);
      tab.theta_e(l, n) = cAl * state.B(n) + cBl * state.A(n) + cCl * state.D(n) + cDl * state.C(n);

      tab.mu_sum(l, n) = std::conj(state.mu(l)) + state.mu(n);
      tab.nu_sum(l, n) = std::conj(state.nu(l)) + state.nu(n);

      cplx exponent = std::conj(state.mu(l)) * state.mu(n) -
                      0.5 * (std::norm(state.mu(l)) + std::norm(state.mu(n))) +
                      std::conj(state.nu(l)) * state.nu(n) -
                      0.5 * (std::norm(state.nu(l)) + std::norm(state.nu(n)));
      cplx bath_cross{0.0, 0.0};
      if (K > 0) {
        bath_cross = ops.cdotc(state.eta_row(l), state.eta_row(n), K);
        exponent += bath_cross - 0.5 * (tab.abs2_eta(l) + tab.abs2_eta(n));
      }
      tab.S(l, n) = std::exp(exponent);

      cplx pi_ln = 0.0;
      if (K > 0) pi_ln = ops.cdotc_rw(bath.omega.data(), state.eta_row(l), state.eta_row(n), K);
      tab.pi_bath(l, n) = pi_ln;
      tab.w(l, n) = std::conj(tab.phi_eta(l)) + tab.phi_eta(n);
    }
  }
  return tab;
}

MultiD2State initial_state(int m, int n_bath, double photons, double noise_scale,
                           std::uint64_t seed) {
  if (photons < 0.0) throw std::runtime_error("ERROR: negative initial photon number");
  if (noise_scale < 0.0) throw std::runtime_error("ERROR: negative displacement noise scale");
  MultiD2State state(m, n_bath);
  state.D(0) = 1.0;                  // qubits start down-down, all weight on branch 1
  state.mu(0) = std::sqrt(photons);  // photons in the left resonator

  // The occupied branch is exact; only the dormant branches get complex
  // Gaussian displacement jitter, which breaks the EOM degeneracy without
  // touching any t=0 observable (their amplitudes are all zero).  noise_scale
  // sets where the spare branches wait for the dynamics to recruit them: small
  // scales cluster them at the vacuum, scales of order sqrt(photons) spread
  // them across the region between the vacuum and the occupied coherent state.
  if (noise_scale > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = noise_scale / std::sqrt(2.0);
    auto draw = [&]() { return cplx{s * gauss(rng), s * gauss(rng)}; };
    for (int n = 1; n < m; ++n) {
      state.mu(n) = draw();
      state.nu(n) = draw();
      for (int k = 0; k < n_bath; ++k) state.eta(n, k) = draw();
    }
  }
  return state;
}

void write_checkpoint(const std::string& path, double t, const MultiD2State& state) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("ERROR: cannot open checkpoint file " + path);
  std::fprintf(f, "%.17g", t);
  const Eigen::VectorXcd v = state.flatten();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    std::fprintf(f, " %.17g %.17g", v(i).real(), v(i).imag());
  std::fprintf(f, "\n");
  std::fclose(f);
}

std::pair<double, MultiD2State> read_checkpoint(const std::string& path, int m, int n_bath) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ERROR: cannot open checkpoint file " + path);
  MultiD2State state(m, n_bath);
  double t = 0.0;
  if (!(in >> t)) throw std::runtime_error("ERROR: checkpoint file " + path + " is empty");
  Eigen::VectorXcd v(state.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im))
      throw std::runtime_error("ERROR: checkpoint file " + path +
                               " ends before all parameters are read");
    v(i) = cplx{re, im};
  }
  state.unflatten(v);
  return {t, state};
}

}  // namespace rdsim
