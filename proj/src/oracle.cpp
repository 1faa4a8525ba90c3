#include "rdsim/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rdsim {
namespace {

constexpr cplx kI{0.0, 1.0};

// Strides of the mixed-radix index
//   i = ((q * np1 + n_L) * np1 + n_R) * nb1^K + sum_k m_k * nb1^(K-1-k).
struct BasisLayout {
  int np1, nb1, n_bath;
  std::ptrdiff_t stride_nr, stride_nl, stride_q;
  std::size_t dim;

  explicit BasisLayout(const FockBasisSpec& spec)
      : np1(spec.n_max_photon + 1), nb1(spec.n_max_bath + 1), n_bath(spec.n_bath) {
    stride_nr = 1;
    for (int k = 0; k < n_bath; ++k) stride_nr *= nb1;
    stride_nl = stride_nr * np1;
    stride_q = stride_nl * np1;
    dim = static_cast<std::size_t>(stride_q) * 4;
  }

  int qubit(std::ptrdiff_t i) const { return static_cast<int>(i / stride_q); }
  int n_left(std::ptrdiff_t i) const { return static_cast<int>(i / stride_nl % np1); }
  int n_right(std::ptrdiff_t i) const { return static_cast<int>(i / stride_nr % np1); }
  int bath_occ(std::ptrdiff_t i, int k) const {
    std::ptrdiff_t s = i % stride_nr;
    for (int j = n_bath - 1; j > k; --j) s /= nb1;
    return static_cast<int>(s % nb1);
  }
};

// sigma_z eigenvalues of the left/right qubit per pair index (uu, ud, du, dd).
constexpr double kSzL[4] = {1.0, 1.0, -1.0, -1.0};
constexpr double kSzR[4] = {1.0, -1.0, 1.0, -1.0};
// Pair index after flipping the left/right qubit (sigma_x action).
constexpr int kFlipL[4] = {2, 3, 0, 1};
constexpr int kFlipR[4] = {1, 0, 3, 2};

void check_bath_match(const DiscretizedBath& bath, const FockBasisSpec& spec) {
  if (bath.size() != spec.n_bath)
    throw std::runtime_error("ERROR: oracle basis and bath disagree on the mode count");
}

// Per-pair-index driving energy (Delta_L sz_L + Delta_R sz_R) / 2 at time t.
void driving_values(const ModelSpec& model, double t, double out[4]) {
  const double dl = model.drive_L.value(t), dr = model.drive_R.value(t);
  for (int q = 0; q < 4; ++q) out[q] = 0.5 * (dl * kSzL[q] + dr * kSzR[q]);
}

// Everything except the driving diagonal; time-independent.
Eigen::SparseMatrix<cplx> static_hamiltonian(const ModelSpec& model,
                                             const DiscretizedBath& bath,
                                             const FockBasisSpec& spec) {
  const BasisLayout lay(spec);
  const auto n = static_cast<Eigen::Index>(fock_dimension(spec));
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(lay.dim * (7 + 2 * static_cast<std::size_t>(spec.n_bath)));
  auto add = [&](std::ptrdiff_t row, std::ptrdiff_t col, double val) {
    trips.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                       cplx{val, 0.0});
  };

  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lay.dim); ++i) {
    const int q = lay.qubit(i);
    const int nl = lay.n_left(i);
    const int nr = lay.n_right(i);

    double diag = model.omega_L * nl + model.omega_R * nr;
    for (int k = 0; k < spec.n_bath; ++k) diag += bath.omega[k] * lay.bath_occ(i, k);
    add(i, i, diag);

    // -J (a_L^dag a_R + a_R^dag a_L)
    if (nl + 1 < lay.np1 && nr > 0)
      add(i + lay.stride_nl - lay.stride_nr, i, -model.J * std::sqrt(double(nl + 1) * nr));
    if (nr + 1 < lay.np1 && nl > 0)
      add(i - lay.stride_nl + lay.stride_nr, i, -model.J * std::sqrt(double(nr + 1) * nl));

    // -g (a^dag + a) sigma_x per site
    const std::ptrdiff_t base_l = i + (kFlipL[q] - q) * lay.stride_q;
    if (nl + 1 < lay.np1)
      add(base_l + lay.stride_nl, i, -model.g * std::sqrt(double(nl + 1)));
    if (nl > 0) add(base_l - lay.stride_nl, i, -model.g * std::sqrt(double(nl)));
    const std::ptrdiff_t base_r = i + (kFlipR[q] - q) * lay.stride_q;
    if (nr + 1 < lay.np1)
      add(base_r + lay.stride_nr, i, -model.g * std::sqrt(double(nr + 1)));
    if (nr > 0) add(base_r - lay.stride_nr, i, -model.g * std::sqrt(double(nr)));

    // phi_k (b_k^dag + b_k)(sigma_z^L + sigma_z^R), diagonal in the qubits
    const double sz_sum = kSzL[q] + kSzR[q];
    if (sz_sum != 0.0) {
      std::ptrdiff_t stride_k = lay.stride_nr;
      for (int k = 0; k < spec.n_bath; ++k) {
        stride_k /= lay.nb1;
        const int mk = lay.bath_occ(i, k);
        if (mk + 1 < lay.nb1)
          add(i + stride_k, i, bath.phi[k] * sz_sum * std::sqrt(double(mk + 1)));
        if (mk > 0) add(i - stride_k, i, bath.phi[k] * sz_sum * std::sqrt(double(mk)));
      }
    }
  }

  Eigen::SparseMatrix<cplx> h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

// All record fields except the energy.
ObservableRecord populations_record(const FockState& state, const BasisLayout& lay,
                                    double t) {
  ObservableRecord rec;
  rec.t = t;
  rec.bath_population = Eigen::VectorXd::Zero(lay.n_bath);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lay.dim); ++i) {
    const double w = std::norm(state.amplitudes(static_cast<Eigen::Index>(i)));
    if (w == 0.0) continue;
    rec.norm += w;
    rec.n_left += w * lay.n_left(i);
    rec.n_right += w * lay.n_right(i);
    rec.sigz_left += w * kSzL[lay.qubit(i)];
    rec.sigz_right += w * kSzR[lay.qubit(i)];
    for (int k = 0; k < lay.n_bath; ++k) rec.bath_population(k) += w * lay.bath_occ(i, k);
  }
  return rec;
}

// <psi| (H0 + driving(t)) |psi> with the static part prebuilt.
double energy_with(const Eigen::SparseMatrix<cplx>& h0, const FockState& state,
                   const ModelSpec& model, const BasisLayout& lay, double t) {
  double e = (state.amplitudes.adjoint() * (h0 * state.amplitudes)).value().real();
  double drive[4];
  driving_values(model, t, drive);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lay.dim); ++i)
    e += drive[lay.qubit(i)] * std::norm(state.amplitudes(static_cast<Eigen::Index>(i)));
  return e;
}

// Fock coefficients of |z>: c_n = exp(-|z|^2/2) z^n / sqrt(n!), checked to
// leave at most kOracleTailTol of weight above the cutoff.
Eigen::VectorXcd coherent_column(cplx z, int n_max, const char* what) {
  Eigen::VectorXcd c(n_max + 1);
  c(0) = std::exp(-0.5 * std::norm(z));
  for (int n = 1; n <= n_max; ++n) c(n) = c(n - 1) * z / std::sqrt(double(n));
  const double tail = 1.0 - c.squaredNorm();
  if (tail > kOracleTailTol)
    throw std::runtime_error(std::string("ERROR: coherent ") + what + " leaves weight " +
                             std::to_string(tail) + " above the oracle cutoff");
  return c;
}

}  // namespace

std::size_t fock_dimension(const FockBasisSpec& spec) {
  if (spec.n_max_photon < 0 || spec.n_max_photon > kMaxOraclePhotonCutoff)
    throw std::runtime_error("ERROR: oracle photon cutoff outside [0, 14]");
  if (spec.n_max_bath < 0 || spec.n_max_bath > kMaxOracleBathCutoff)
    throw std::runtime_error("ERROR: oracle bath cutoff outside [0, 4]");
  if (spec.n_bath < 0 || spec.n_bath > kMaxOracleBathModes)
    throw std::runtime_error("ERROR: oracle bath mode count outside [0, 3]");
  const BasisLayout lay(spec);
  if (lay.dim > spec.max_dim)
    throw std::runtime_error("ERROR: oracle dimension " + std::to_string(lay.dim) +
                             " exceeds the budget " + std::to_string(spec.max_dim));
  return lay.dim;
}

Eigen::SparseMatrix<cplx> build_hamiltonian(const ModelSpec& model,
                                            const DiscretizedBath& bath,
                                            const FockBasisSpec& spec, double t) {
  check_bath_match(bath, spec);
  const BasisLayout lay(spec);
  const auto n = static_cast<Eigen::Index>(fock_dimension(spec));
  Eigen::SparseMatrix<cplx> h = static_hamiltonian(model, bath, spec);
  double drive[4];
  driving_values(model, t, drive);
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(lay.dim);
  for (Eigen::Index i = 0; i < n; ++i)
    trips.emplace_back(i, i, cplx{drive[lay.qubit(i)], 0.0});
  Eigen::SparseMatrix<cplx> d(n, n);
  d.setFromTriplets(trips.begin(), trips.end());
  return h + d;
}

FockState convert_ansatz_to_fock(const MultiD2State& state, const FockBasisSpec& spec) {
  if (state.n_bath != spec.n_bath)
    throw std::runtime_error("ERROR: oracle basis and ansatz disagree on the mode count");
  const BasisLayout lay(spec);
  fock_dimension(spec);

  FockState out;
  out.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(lay.dim));
  for (int n = 0; n < state.m; ++n) {
    const Eigen::VectorXcd cl = coherent_column(state.mu(n), spec.n_max_photon, "mu");
    const Eigen::VectorXcd cr = coherent_column(state.nu(n), spec.n_max_photon, "nu");
    std::vector<Eigen::VectorXcd> cb;
    cb.reserve(static_cast<std::size_t>(spec.n_bath));
    for (int k = 0; k < spec.n_bath; ++k)
      cb.push_back(coherent_column(state.eta(n, k), spec.n_max_bath, "eta"));
    const cplx amps[4] = {state.A(n), state.B(n), state.C(n), state.D(n)};

    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lay.dim); ++i) {
      cplx v = amps[lay.qubit(i)];
      if (v == cplx{0.0, 0.0}) continue;
      v *= cl(lay.n_left(i)) * cr(lay.n_right(i));
      for (int k = 0; k < spec.n_bath; ++k) v *= cb[static_cast<std::size_t>(k)](lay.bath_occ(i, k));
      out.amplitudes(static_cast<Eigen::Index>(i)) += v;
    }
  }
  return out;
}

ObservableRecord fock_observables(const FockState& state, const ModelSpec& model,
                                  const DiscretizedBath& bath, const FockBasisSpec& spec,
                                  double t) {
  check_bath_match(bath, spec);
  const BasisLayout lay(spec);
  if (state.amplitudes.size() != static_cast<Eigen::Index>(lay.dim))
    throw std::runtime_error("ERROR: state dimension does not match the oracle basis");
  ObservableRecord rec = populations_record(state, lay, t);
  rec.energy = energy_with(static_hamiltonian(model, bath, spec), state, model, lay, t);
  return rec;
}

std::vector<ObservableRecord> propagate_exact(const FockState& initial,
                                              const ModelSpec& model,
                                              const DiscretizedBath& bath,
                                              const FockBasisSpec& spec, double t_max,
                                              double dt, int sample_every) {
  validate(model);
  check_bath_match(bath, spec);
  const BasisLayout lay(spec);
  if (initial.amplitudes.size() != static_cast<Eigen::Index>(lay.dim))
    throw std::runtime_error("ERROR: state dimension does not match the oracle basis");
  if (!(dt > 0.0)) throw std::runtime_error("ERROR: dt must be > 0");
  if (t_max < 0.0) throw std::runtime_error("ERROR: t_max must be >= 0");
  if (sample_every < 1) throw std::runtime_error("ERROR: sample_every must be >= 1");

  const Eigen::SparseMatrix<cplx> h0 = static_hamiltonian(model, bath, spec);
  std::vector<int> qubit_of(lay.dim);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(lay.dim); ++i)
    qubit_of[static_cast<std::size_t>(i)] = lay.qubit(i);

  auto deriv = [&](const Eigen::VectorXcd& psi, double t, Eigen::VectorXcd& out) {
    out.noalias() = h0 * psi;
    double drive[4];
    driving_values(model, t, drive);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      out(i) = -kI * (out(i) + drive[qubit_of[static_cast<std::size_t>(i)]] * psi(i));
  };

  auto sample = [&](const FockState& st, double t) {
    ObservableRecord rec = populations_record(st, lay, t);
    rec.energy = energy_with(h0, st, model, lay, t);
    return rec;
  };

  FockState cur = initial;
  const double norm0 = cur.amplitudes.squaredNorm();
  const auto nsteps = static_cast<long long>(std::llround(t_max / dt));

  std::vector<ObservableRecord> records;
  records.push_back(sample(cur, 0.0));

  const Eigen::Index n = cur.amplitudes.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), stage(n);
  for (long long step = 1; step <= nsteps; ++step) {
    const double t0 = (step - 1) * dt;
    deriv(cur.amplitudes, t0, k1);
    stage = cur.amplitudes + (0.5 * dt) * k1;
    deriv(stage, t0 + 0.5 * dt, k2);
    stage = cur.amplitudes + (0.5 * dt) * k2;
    deriv(stage, t0 + 0.5 * dt, k3);
    stage = cur.amplitudes + dt * k3;
    deriv(stage, t0 + dt, k4);
    cur.amplitudes += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(cur.amplitudes.squaredNorm() - norm0);
    if (drift > kOracleNormTol)
      throw std::runtime_error("ERROR: oracle norm drift " + std::to_string(drift) +
                               " at t = " + std::to_string(step * dt));
    if (step % sample_every == 0 || step == nsteps)
      records.push_back(sample(cur, step * dt));
  }
  return records;
}

}  // namespace rdsim
