#include "rdsim/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rdsim/kernels.hpp"

namespace rdsim {
namespace {

double real_checked(cplx value, const char* what) {
  if (std::abs(value.imag()) > kImagResidueTol)
    throw std::runtime_error("ERROR: " + std::string(what) + " has imaginary residue " +
                             std::to_string(value.imag()));
  return value.real();
}

}  // namespace

std::pair<double, double> photon_numbers(const MultiD2State& state, const OverlapTables& tab) {
  cplx left{0.0, 0.0}, right{0.0, 0.0};
  for (int l = 0; l < state.m; ++l) {
    for (int n = 0; n < state.m; ++n) {
      const cplx w = tab.theta_a(l, n) * tab.S(l, n);
      left += w * std::conj(state.mu(l)) * state.mu(n);
      right += w * std::conj(state.nu(l)) * state.nu(n);
    }
  }
  return {real_checked(left, "left photon number"), real_checked(right, "right photon number")};
}

std::pair<double, double> qubit_polarizations(const OverlapTables& tab) {
  cplx left{0.0, 0.0}, right{0.0, 0.0};
  const int m = static_cast<int>(tab.S.rows());
  for (int l = 0; l < m; ++l) {
    for (int n = 0; n < m; ++n) {
      left += tab.theta_b(l, n) * tab.S(l, n);
      right += tab.theta_c(l, n) * tab.S(l, n);
    }
  }
  return {real_checked(left, "left polarization"), real_checked(right, "right polarization")};
}

Eigen::VectorXd bath_populations(const MultiD2State& state, const OverlapTables& tab) {
  const auto& ops = kernels::active();
  const auto K = static_cast<std::size_t>(state.n_bath);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(state.n_bath);
  for (int l = 0; l < state.m; ++l)
    for (int n = 0; n < state.m; ++n)
      ops.cmuladd_conj(tab.theta_a(l, n) * tab.S(l, n), state.eta_row(l), state.eta_row(n),
                       acc.data(), K);
  Eigen::VectorXd out(state.n_bath);
  for (int k = 0; k < state.n_bath; ++k) out(k) = real_checked(acc(k), "bath population");
  return out;
}

double norm_value(const OverlapTables& tab) {
  cplx acc{0.0, 0.0};
  const int m = static_cast<int>(tab.S.rows());
  for (int l = 0; l < m; ++l)
    for (int n = 0; n < m; ++n) acc += tab.theta_a(l, n) * tab.S(l, n);
  return real_checked(acc, "norm");
}

double energy(const MultiD2State& state, const OverlapTables& tab, const ModelSpec& model,
              double t) {
  const double dl = model.drive_L.value(t);
  const double dr = model.drive_R.value(t);
  cplx acc{0.0, 0.0};
  for (int l = 0; l < state.m; ++l) {
    for (int n = 0; n < state.m; ++n) {
      // resonator + bath single-particle energy plus the photon hop
      cplx pair_sum = tab.theta_a(l, n) *
                      (model.omega_L * std::conj(state.mu(l)) * state.mu(n) +
                       model.omega_R * std::conj(state.nu(l)) * state.nu(n) -
                       model.J * (std::conj(state.mu(l)) * state.nu(n) +
                                  std::conj(state.nu(l)) * state.mu(n)) +
                       tab.pi_bath(l, n));
      // driven qubit splittings
      pair_sum += 0.5 * dl * tab.theta_b(l, n) + 0.5 * dr * tab.theta_c(l, n);
      // qubit-resonator coupling
      pair_sum -= model.g * (tab.theta_d(l, n) * tab.mu_sum(l, n) +
                             tab.theta_e(l, n) * tab.nu_sum(l, n));
      // bath displacement coupling to sigma_z^L + sigma_z^R
      pair_sum += 2.0 * (std::conj(state.A(l)) * state.A(n) -
                         std::conj(state.D(l)) * state.D(n)) *
                  tab.w(l, n);
      acc += pair_sum * tab.S(l, n);
    }
  }
  return real_checked(acc, "energy");
}

cplx braket_h(const MultiD2State& bra, const MultiD2State& ket, const ModelSpec& model,
              const DiscretizedBath& bath, double t) {
  if (bra.n_bath != ket.n_bath || bra.n_bath != bath.size())
    throw std::runtime_error("ERROR: braket_h needs matching bath sizes");
  const auto& ops = kernels::active();
  const auto K = static_cast<std::size_t>(bra.n_bath);
  const double dl = model.drive_L.value(t);
  const double dr = model.drive_R.value(t);

  cplx acc{0.0, 0.0};
  for (int l = 0; l < bra.m; ++l) {
    for (int n = 0; n < ket.m; ++n) {
      const cplx cA = std::conj(bra.A(l)), cB = std::conj(bra.B(l));
      const cplx cC = std::conj(bra.C(l)), cD = std::conj(bra.D(l));
      const cplx ta = cA * ket.A(n) + cB * ket.B(n) + cC * ket.C(n) + cD * ket.D(n);
      const cplx tb = cA * ket.A(n) + cB * ket.B(n) - cC * ket.C(n) - cD * ket.D(n);
      const cplx tc = cA * ket.A(n) - cB * ket.B(n) + cC * ket.C(n) - cD * ket.D(n);
      const cplx td = cA * ket.C(n) + cB * ket.D(n) + cC * ket.A(n) + cD * ket.B(n);
      const cplx te = cA * ket.B(n) + cB * ket.A(n) + cC * ket.D(n) + cD * ket.C(n);

      cplx ov = debye_waller(&bra.mu(l), &ket.mu(n), 1) * debye_waller(&bra.nu(l), &ket.nu(n), 1);
      cplx pi = 0.0, w = 0.0;
      if (K > 0) {
        ov *= debye_waller(bra.eta_row(l), ket.eta_row(n), K);
        pi = ops.cdotc_rw(bath.omega.data(), bra.eta_row(l), ket.eta_row(n), K);
        w = std::conj(ops.cdot_rw(bath.phi.data(), bra.eta_row(l), K)) +
            ops.cdot_rw(bath.phi.data(), ket.eta_row(n), K);
      }

      cplx pair_sum = ta * (model.omega_L * std::conj(bra.mu(l)) * ket.mu(n) +
                            model.omega_R * std::conj(bra.nu(l)) * ket.nu(n) -
                            model.J * (std::conj(bra.mu(l)) * ket.nu(n) +
                                       std::conj(bra.nu(l)) * ket.mu(n)) +
                            pi);
      pair_sum += 0.5 * dl * tb + 0.5 * dr * tc;
      pair_sum -= model.g * (td * (std::conj(bra.mu(l)) + ket.mu(n)) +
                             te * (std::conj(bra.nu(l)) + ket.nu(n)));
      pair_sum += 2.0 * (cA * ket.A(n) - cD * ket.D(n)) * w;
      acc += pair_sum * ov;
    }
  }
  return acc;
}

ObservableRecord evaluate(const MultiD2State& state, const ModelSpec& model,
                          const DiscretizedBath& bath, double t) {
  const OverlapTables tab = build_overlap_tables(state, bath);
  ObservableRecord rec;
  rec.t = t;
  std::tie(rec.n_left, rec.n_right) = photon_numbers(state, tab);
  std::tie(rec.sigz_left, rec.sigz_right) = qubit_polarizations(tab);
  rec.norm = norm_value(tab);
  rec.energy = energy(state, tab, model, t);
  rec.bath_population = bath_populations(state, tab);
  return rec;
}

}  // namespace rdsim
