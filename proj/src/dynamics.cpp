#include "rdsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rdsim/kernels.hpp"

namespace rdsim {
namespace {

constexpr cplx kI{0.0, 1.0};

double* dview(Eigen::VectorXcd& v) { return reinterpret_cast<double*>(v.data()); }

// Buffers reused across all stage evaluations of a run.
struct EomWorkspace {
  int m, K, Q, P;
  Eigen::MatrixXcd L, Kc;
  Eigen::VectorXcd r;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  LstsqWorkspace lstsq;
  MultiD2State scratch;
  EtaMatrix weta;        // omega_k-weighted bath displacements per branch
  Eigen::VectorXcd ccv;  // conj(eta_l) - eta_n/2 scratch
  Eigen::VectorXcd y0, k1, k2, k3, k4, ystage;

  EomWorkspace(int m_, int K_)
      : m(m_),
        K(K_),
        Q(m_ * (6 + K_)),
        P(2 * Q),
        L(Q, Q),
        Kc(Q, Q),
        r(Q),
        A(P, P),
        b(P),
        lstsq(P),
        scratch(m_, K_),
        weta(m_, std::max(K_, 1)),
        ccv(std::max(K_, 1)),
        y0(Q),
        k1(Q),
        k2(Q),
        k3(Q),
        k4(Q),
        ystage(Q) {}
};

// Fill L, K, r with the tangent equations at time t.  Row/column index
// packing follows MultiD2State::flatten: families A, B, C, D, mu, nu occupy
// blocks of m, then each branch's bath displacements follow contiguously.
void assemble_core(Eigen::MatrixXcd& Lm, Eigen::MatrixXcd& Km, Eigen::VectorXcd& rv,
                   EtaMatrix& weta, Eigen::VectorXcd& ccv, const MultiD2State& st,
                   const OverlapTables& tab, const ModelSpec& model,
                   const DiscretizedBath& bath, double t) {
  const auto& ops = kernels::active();
  const int m = st.m;
  const int K = st.n_bath;
  const int Q = st.dim();
  const auto Ks = static_cast<std::size_t>(K);

  Lm.setZero();
  Km.setZero();
  rv.setZero();

  for (int n = 0; n < m; ++n)
    for (int k = 0; k < K; ++k) weta(n, k) = bath.omega[k] * st.eta(n, k);

  const double dl = model.drive_L.value(t);
  const double dr = model.drive_R.value(t);
  const double g = model.g;

  cplx* Ld = Lm.data();
  cplx* Kd = Km.data();
  auto col = [&](int j) { return static_cast<std::ptrdiff_t>(j) * Q; };

  for (int l = 0; l < m; ++l) {
    const int erow = 6 * m + l * K;  // first bath row of bra branch l
    const cplx cmul = std::conj(st.mu(l));
    const cplx cnul = std::conj(st.nu(l));
    const cplx amps_l[4] = {st.A(l), st.B(l), st.C(l), st.D(l)};

    for (int n = 0; n < m; ++n) {
      const cplx S = tab.S(l, n);
      const cplx iS = kI * S;
      const cplx tha = tab.theta_a(l, n), thb = tab.theta_b(l, n), thc = tab.theta_c(l, n);
      const cplx thd = tab.theta_d(l, n), the = tab.theta_e(l, n);
      const cplx musum = tab.mu_sum(l, n), nusum = tab.nu_sum(l, n);
      const cplx w = tab.w(l, n);
      const cplx mun = st.mu(n), nun = st.nu(n);
      const cplx amps_n[4] = {st.A(n), st.B(n), st.C(n), st.D(n)};
      const cplx* eta_n = st.eta_row(n);

      // ---- amplitude columns -------------------------------------------
      for (int f = 0; f < 4; ++f) {
        cplx* c = Ld + col(f * m + n);
        c[f * m + l] += iS;
        const cplx back = iS * std::conj(amps_l[f]);
        c[4 * m + l] += back * mun;
        c[5 * m + l] += back * nun;
        if (K > 0) ops.caxpy(back, eta_n, c + erow, Ks);
      }

      // ---- mu and nu columns -------------------------------------------
      const cplx cmu = cmul - 0.5 * std::conj(mun);
      const cplx kmu = -0.5 * mun;
      const cplx cnu = cnul - 0.5 * std::conj(nun);
      const cplx knu = -0.5 * nun;
      {
        cplx* cL = Ld + col(4 * m + n);
        cplx* cK = Kd + col(4 * m + n);
        for (int f = 0; f < 4; ++f) {
          cL[f * m + l] += iS * amps_n[f] * cmu;
          cK[f * m + l] += iS * amps_n[f] * kmu;
        }
        cL[4 * m + l] += iS * tha * (1.0 + mun * cmu);
        cK[4 * m + l] += iS * tha * mun * kmu;
        cL[5 * m + l] += iS * tha * nun * cmu;
        cK[5 * m + l] += iS * tha * nun * kmu;
        if (K > 0) {
          ops.caxpy(iS * tha * cmu, eta_n, cL + erow, Ks);
          ops.caxpy(iS * tha * kmu, eta_n, cK + erow, Ks);
        }
      }
      {
        cplx* cL = Ld + col(5 * m + n);
        cplx* cK = Kd + col(5 * m + n);
        for (int f = 0; f < 4; ++f) {
          cL[f * m + l] += iS * amps_n[f] * cnu;
          cK[f * m + l] += iS * amps_n[f] * knu;
        }
        cL[4 * m + l] += iS * tha * mun * cnu;
        cK[4 * m + l] += iS * tha * mun * knu;
        cL[5 * m + l] += iS * tha * (1.0 + nun * cnu);
        cK[5 * m + l] += iS * tha * nun * knu;
        if (K > 0) {
          ops.caxpy(iS * tha * cnu, eta_n, cL + erow, Ks);
          ops.caxpy(iS * tha * knu, eta_n, cK + erow, Ks);
        }
      }

      // ---- bath columns ------------------------------------------------
      if (K > 0) {
        ops.conj_combine(st.eta_row(l), eta_n, ccv.data(), Ks);
        for (int k = 0; k < K; ++k) {
          const cplx cc = ccv(k);
          const cplx kk = -0.5 * eta_n[k];
          cplx* cL = Ld + col(6 * m + n * K + k);
          cplx* cK = Kd + col(6 * m + n * K + k);
          for (int f = 0; f < 4; ++f) {
            cL[f * m + l] += iS * amps_n[f] * cc;
            cK[f * m + l] += iS * amps_n[f] * kk;
          }
          cL[4 * m + l] += iS * tha * mun * cc;
          cK[4 * m + l] += iS * tha * mun * kk;
          cL[5 * m + l] += iS * tha * nun * cc;
          cK[5 * m + l] += iS * tha * nun * kk;
          ops.caxpy(iS * tha * cc, eta_n, cL + erow, Ks);
          ops.caxpy(iS * tha * kk, eta_n, cK + erow, Ks);
          cL[erow + k] += iS * tha;
        }
      }

      // ---- right-hand side ---------------------------------------------
      const cplx pi_full = model.omega_L * cmul * mun + model.omega_R * cnul * nun -
                           model.J * (cmul * nun + cnul * mun) + tab.pi_bath(l, n);
      const cplx ad = std::conj(st.A(l)) * st.A(n) - std::conj(st.D(l)) * st.D(n);

      rv(l) += S * (amps_n[0] * (0.5 * (dl + dr) + pi_full + 2.0 * w) -
                    g * (musum * amps_n[2] + nusum * amps_n[1]));
      rv(m + l) += S * (amps_n[1] * (0.5 * (dl - dr) + pi_full) -
                        g * (musum * amps_n[3] + nusum * amps_n[0]));
      rv(2 * m + l) += S * (amps_n[2] * (0.5 * (dr - dl) + pi_full) -
                            g * (musum * amps_n[0] + nusum * amps_n[3]));
      rv(3 * m + l) += S * (amps_n[3] * (-0.5 * (dl + dr) + pi_full - 2.0 * w) -
                            g * (musum * amps_n[1] + nusum * amps_n[2]));

      const cplx common = 0.5 * dl * thb + 0.5 * dr * thc + tha * pi_full + 2.0 * ad * w;
      rv(4 * m + l) += S * (common * mun + tha * (model.omega_L * mun - model.J * nun) -
                            g * thd * (1.0 + mun * musum) - g * the * mun * nusum);
      rv(5 * m + l) += S * (common * nun + tha * (model.omega_R * nun - model.J * mun) -
                            g * the * (1.0 + nun * nusum) - g * thd * nun * musum);
      if (K > 0) {
        cplx* rs = rv.data() + erow;
        ops.caxpy(S * (common - g * thd * musum - g * the * nusum), eta_n, rs, Ks);
        ops.caxpy(S * tha, weta.row(n).data(), rs, Ks);
        ops.caxpy_rx(2.0 * ad * S, bath.phi.data(), rs, Ks);
      }
    }
  }
}

// Fold the complex blocks into the doubled real system and solve it.
Eigen::VectorXcd embed_and_solve(const Eigen::MatrixXcd& Lm, const Eigen::MatrixXcd& Km,
                                 const Eigen::VectorXcd& rv, double rcond,
                                 Eigen::MatrixXd& A, Eigen::VectorXd& b,
                                 LstsqWorkspace& lstsq, SolverReport& report) {
  const auto& ops = kernels::active();
  const int Q = static_cast<int>(rv.size());
  const auto Qs = static_cast<std::size_t>(Q);
  for (int j = 0; j < Q; ++j)
    ops.real_embed_col(Lm.data() + static_cast<std::ptrdiff_t>(j) * Q,
                       Km.data() + static_cast<std::ptrdiff_t>(j) * Q,
                       A.data() + static_cast<std::ptrdiff_t>(j) * 2 * Q,
                       A.data() + static_cast<std::ptrdiff_t>(Q + j) * 2 * Q, Qs);
  for (int i = 0; i < Q; ++i) {
    b(i) = rv(i).real();
    b(Q + i) = rv(i).imag();
  }
  const Eigen::VectorXd x = lstsq.solve(A, b, rcond, report);
  Eigen::VectorXcd udot(Q);
  for (int i = 0; i < Q; ++i) udot(i) = cplx{x(i), x(Q + i)};
  return udot;
}

// Velocity field evaluation: unpack y, rebuild tables, assemble, solve.
void eom_derivative(EomWorkspace& ws, const ModelSpec& model, const DiscretizedBath& bath,
                    const Eigen::VectorXcd& y, double t, double rcond,
                    Eigen::VectorXcd& out, StepStats& stats) {
  ws.scratch.unflatten(y);
  const OverlapTables tab = build_overlap_tables(ws.scratch, bath);
  assemble_core(ws.L, ws.Kc, ws.r, ws.weta, ws.ccv, ws.scratch, tab, model, bath, t);
  SolverReport report;
  out = embed_and_solve(ws.L, ws.Kc, ws.r, rcond, ws.A, ws.b, ws.lstsq, report);
  stats.absorb(report);
}

// Classic RK4 update of the packed parameter vector, in place.
void rk4_into(EomWorkspace& ws, const ModelSpec& model, const DiscretizedBath& bath,
              Eigen::VectorXcd& y, double t, double dt, double rcond, StepStats& stats) {
  const auto& ops = kernels::active();
  const auto n2 = static_cast<std::size_t>(2 * ws.Q);
  eom_derivative(ws, model, bath, y, t, rcond, ws.k1, stats);
  ops.axpy_d(dview(ws.ystage), dview(y), 0.5 * dt, dview(ws.k1), n2);
  eom_derivative(ws, model, bath, ws.ystage, t + 0.5 * dt, rcond, ws.k2, stats);
  ops.axpy_d(dview(ws.ystage), dview(y), 0.5 * dt, dview(ws.k2), n2);
  eom_derivative(ws, model, bath, ws.ystage, t + 0.5 * dt, rcond, ws.k3, stats);
  ops.axpy_d(dview(ws.ystage), dview(y), dt, dview(ws.k3), n2);
  eom_derivative(ws, model, bath, ws.ystage, t + dt, rcond, ws.k4, stats);
  ops.lincomb4_d(dview(y), dview(y), dt / 6.0, dview(ws.k1), dt / 3.0, dview(ws.k2),
                 dt / 3.0, dview(ws.k3), dt / 6.0, dview(ws.k4), n2);
  ++stats.steps;
}

double norm_of(const MultiD2State& st) { return braket(st, st).real(); }

}  // namespace

void StepStats::absorb(const SolverReport& report) {
  min_rank = (solves == 0) ? report.rank : std::min(min_rank, report.rank);
  max_condition = std::max(max_condition, report.condition);
  max_residual = std::max(max_residual, report.residual);
  ++solves;
}

void StepStats::merge(const StepStats& other) {
  if (other.solves == 0) return;
  min_rank = (solves == 0) ? other.min_rank : std::min(min_rank, other.min_rank);
  max_condition = std::max(max_condition, other.max_condition);
  max_residual = std::max(max_residual, other.max_residual);
  solves += other.solves;
  steps += other.steps;
  retries += other.retries;
}

EomSystem assemble_eom(const MultiD2State& state, const OverlapTables& tab,
                       const ModelSpec& model, const DiscretizedBath& bath, double t) {
  if (state.n_bath != bath.size())
    throw std::runtime_error("ERROR: state and bath disagree on the mode count");
  const int Q = state.dim();
  EomSystem sys;
  sys.L.resize(Q, Q);
  sys.K.resize(Q, Q);
  sys.r.resize(Q);
  EtaMatrix weta(state.m, std::max(state.n_bath, 1));
  Eigen::VectorXcd ccv(std::max(state.n_bath, 1));
  assemble_core(sys.L, sys.K, sys.r, weta, ccv, state, tab, model, bath, t);
  return sys;
}

TangentVector solve_tangent(const EomSystem& sys, double rcond, SolverReport& report) {
  const int Q = static_cast<int>(sys.r.size());
  if (sys.L.rows() != Q || sys.L.cols() != Q || sys.K.rows() != Q || sys.K.cols() != Q)
    throw std::runtime_error("ERROR: tangent system blocks have inconsistent shapes");
  Eigen::MatrixXd A(2 * Q, 2 * Q);
  Eigen::VectorXd b(2 * Q);
  LstsqWorkspace lstsq(2 * Q);
  TangentVector out;
  out.udot = embed_and_solve(sys.L, sys.K, sys.r, rcond, A, b, lstsq, report);
  return out;
}

MultiD2State rk4_step(const ModelSpec& model, const DiscretizedBath& bath,
                      const MultiD2State& state, double t, double dt, double rcond,
                      StepStats& stats) {
  EomWorkspace ws(state.m, state.n_bath);
  Eigen::VectorXcd y = state.flatten();
  rk4_into(ws, model, bath, y, t, dt, rcond, stats);
  MultiD2State out(state.m, state.n_bath);
  out.unflatten(y);
  return out;
}

PropagationResult propagate(const ModelSpec& model, const DiscretizedBath& bath,
                            const MultiD2State& initial, const PropagationOptions& options) {
  validate(model);
  if (initial.n_bath != bath.size())
    throw std::runtime_error("ERROR: initial state and bath disagree on the mode count");
  if (!(options.dt > 0.0)) throw std::runtime_error("ERROR: dt must be > 0");
  if (options.t_max < 0.0) throw std::runtime_error("ERROR: t_max must be >= 0");
  if (options.sample_every < 1)
    throw std::runtime_error("ERROR: sample_every must be >= 1");
  if (!(options.rcond > 0.0)) throw std::runtime_error("ERROR: rcond must be > 0");

  EomWorkspace ws(initial.m, initial.n_bath);
  PropagationResult res;
  MultiD2State cur = initial;
  Eigen::VectorXcd y = initial.flatten();
  const double norm0 = norm_of(cur);
  const auto nsteps = static_cast<long long>(std::llround(options.t_max / options.dt));

  res.records.push_back(evaluate(cur, model, bath, 0.0));

  for (long long step = 1; step <= nsteps; ++step) {
    const double t0 = (step - 1) * options.dt;
    ws.y0 = y;

    // Attempts the interval as one step or two half steps; a least-squares
    // breakdown counts as a failed attempt just like a norm violation.
    auto try_step = [&](bool halves) -> std::string {
      y = ws.y0;
      try {
        if (halves) {
          rk4_into(ws, model, bath, y, t0, 0.5 * options.dt, options.rcond, res.stats);
          rk4_into(ws, model, bath, y, t0 + 0.5 * options.dt, 0.5 * options.dt,
                   options.rcond, res.stats);
        } else {
          rk4_into(ws, model, bath, y, t0, options.dt, options.rcond, res.stats);
        }
      } catch (const std::runtime_error& err) {
        return err.what();
      }
      cur.unflatten(y);
      const double drift = std::abs(norm_of(cur) - norm0);
      if (drift > options.norm_tol) {
        char msg[64];
        std::snprintf(msg, sizeof msg, "norm drift %.3e exceeds tolerance", drift);
        return msg;
      }
      return {};
    };

    std::string failure = try_step(false);
    if (!failure.empty()) {
      ++res.stats.retries;
      failure = try_step(true);
    }
    if (!failure.empty()) {
      y = ws.y0;
      cur.unflatten(y);
      res.aborted = true;
      res.abort_time = t0;
      res.abort_reason = failure + " at t = " + std::to_string(t0 + options.dt);
      if (!options.checkpoint_path.empty())
        write_checkpoint(options.checkpoint_path, t0, cur);
      break;
    }

    const double t1 = step * options.dt;
    if (step % options.sample_every == 0 || step == nsteps)
      res.records.push_back(evaluate(cur, model, bath, t1));
    if (options.checkpoint_every > 0 && !options.checkpoint_path.empty() &&
        step % options.checkpoint_every == 0)
      write_checkpoint(options.checkpoint_path, t1, cur);
  }

  res.final_state = cur;
  return res;
}

}  // namespace rdsim
