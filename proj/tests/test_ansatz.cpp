#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include "rdsim/ansatz.hpp"

using rdsim::cplx;

namespace {

// Independent oracle: coherent-state overlap through its Fock expansion,
// <z|w> = sum_n conj(c_n(z)) c_n(w) with c_n = exp(-|z|^2/2) z^n / sqrt(n!).
cplx coherent_overlap_series(cplx z, cplx w) {
  cplx term_z = std::exp(-0.5 * std::norm(z));
  cplx term_w = std::exp(-0.5 * std::norm(w));
  cplx acc{0.0, 0.0};
  for (int n = 0; n < 80; ++n) {
    acc += std::conj(term_z) * term_w;
    term_z *= z / std::sqrt(n + 1.0);
    term_w *= w / std::sqrt(n + 1.0);
  }
  return acc;
}

rdsim::MultiD2State random_state(std::mt19937_64& rng, int m, int k, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  rdsim::MultiD2State st(m, k);
  auto draw = [&]() { return cplx{g(rng), g(rng)}; };
  for (int n = 0; n < m; ++n) {
    st.A(n) = draw();
    st.B(n) = draw();
    st.C(n) = draw();
    st.D(n) = draw();
    st.mu(n) = draw();
    st.nu(n) = draw();
    for (int j = 0; j < k; ++j) st.eta(n, j) = draw();
  }
  return st;
}

rdsim::DiscretizedBath toy_bath(int k) {
  rdsim::DiscretizedBath bath;
  for (int j = 0; j < k; ++j) {
    bath.omega.push_back(0.3 + 0.4 * j);
    bath.phi.push_back(0.2 + 0.1 * j);
    bath.edges.push_back(0.1 + 0.4 * j);
  }
  bath.edges.push_back(0.1 + 0.4 * k);
  return bath;
}

}  // namespace

TEST_CASE("displacement overlap matches the Fock-series oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.1, 1.1);
  for (int rep = 0; rep < 25; ++rep) {
    const cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const cplx direct = rdsim::debye_waller(&a, &b, 1);
    const cplx series = coherent_overlap_series(a, b);
    CHECK(std::abs(direct - series) < 1e-12);
  }
  // multimode overlap factorizes
  const cplx a[2] = {{0.3, -0.2}, {0.7, 0.1}};
  const cplx b[2] = {{-0.4, 0.5}, {0.2, 0.2}};
  const cplx prod = rdsim::debye_waller(&a[0], &b[0], 1) * rdsim::debye_waller(&a[1], &b[1], 1);
  CHECK(std::abs(rdsim::debye_waller(a, b, 2) - prod) < 1e-13);
}

TEST_CASE("ansatz inner product matches the mode-by-mode series oracle") {
  std::mt19937_64 rng(37);
  const int m = 2, k = 2;
  const auto bra = random_state(rng, m, k, 0.5);
  const auto ket = random_state(rng, m, k, 0.5);

  cplx expect{0.0, 0.0};
  for (int l = 0; l < m; ++l) {
    for (int n = 0; n < m; ++n) {
      const cplx amp = std::conj(bra.A(l)) * ket.A(n) + std::conj(bra.B(l)) * ket.B(n) +
                       std::conj(bra.C(l)) * ket.C(n) + std::conj(bra.D(l)) * ket.D(n);
      cplx ov = coherent_overlap_series(bra.mu(l), ket.mu(n)) *
                coherent_overlap_series(bra.nu(l), ket.nu(n));
      for (int j = 0; j < k; ++j) ov *= coherent_overlap_series(bra.eta(l, j), ket.eta(n, j));
      expect += amp * ov;
    }
  }
  const cplx got = rdsim::braket(bra, ket);
  CHECK(std::abs(got - expect) < 1e-12);

  // Hermiticity of the inner product
  const cplx rev = rdsim::braket(ket, bra);
  CHECK(std::abs(rev - std::conj(got)) < 1e-13);
}

TEST_CASE("overlap tables agree with direct per-pair evaluation") {
  std::mt19937_64 rng(41);
  const int m = 3, k = 4;
  const auto st = random_state(rng, m, k, 0.4);
  const auto bath = toy_bath(k);
  const auto tab = rdsim::build_overlap_tables(st, bath);

  for (int l = 0; l < m; ++l) {
    CHECK(std::abs(tab.S(l, l) - cplx{1.0, 0.0}) < 1e-14);
    for (int n = 0; n < m; ++n) {
      // S is the product of all displacement overlaps
      cplx ov = rdsim::debye_waller(&st.mu(l), &st.mu(n), 1) *
                rdsim::debye_waller(&st.nu(l), &st.nu(n), 1) *
                rdsim::debye_waller(st.eta_row(l), st.eta_row(n), k);
      CHECK(std::abs(tab.S(l, n) - ov) < 1e-13);

      cplx pi = 0.0, w = 0.0;
      for (int j = 0; j < k; ++j) {
        pi += bath.omega[j] * std::conj(st.eta(l, j)) * st.eta(n, j);
        w += bath.phi[j] * (std::conj(st.eta(l, j)) + st.eta(n, j));
      }
      CHECK(std::abs(tab.pi_bath(l, n) - pi) < 1e-13);
      CHECK(std::abs(tab.w(l, n) - w) < 1e-13);
      CHECK(std::abs(tab.mu_sum(l, n) - (std::conj(st.mu(l)) + st.mu(n))) < 1e-15);

      const cplx ta = std::conj(st.A(l)) * st.A(n) + std::conj(st.B(l)) * st.B(n) +
                      std::conj(st.C(l)) * st.C(n) + std::conj(st.D(l)) * st.D(n);
      const cplx tb = std::conj(st.A(l)) * st.A(n) + std::conj(st.B(l)) * st.B(n) -
                      std::conj(st.C(l)) * st.C(n) - std::conj(st.D(l)) * st.D(n);
      const cplx td = std::conj(st.A(l)) * st.C(n) + std::conj(st.B(l)) * st.D(n) +
                      std::conj(st.C(l)) * st.A(n) + std::conj(st.D(l)) * st.B(n);
      CHECK(std::abs(tab.theta_a(l, n) - ta) < 1e-14);
      CHECK(std::abs(tab.theta_b(l, n) - tb) < 1e-14);
      CHECK(std::abs(tab.theta_d(l, n) - td) < 1e-14);

      // Hermiticity of every pairwise table
      CHECK(std::abs(tab.S(l, n) - std::conj(tab.S(n, l))) < 1e-14);
      CHECK(std::abs(tab.pi_bath(l, n) - std::conj(tab.pi_bath(n, l))) < 1e-14);
      CHECK(std::abs(tab.theta_e(l, n) - std::conj(tab.theta_e(n, l))) < 1e-14);
    }
  }

  // norm from the tables equals the direct inner product
  cplx norm_tab{0.0, 0.0};
  for (int l = 0; l < m; ++l)
    for (int n = 0; n < m; ++n) norm_tab += tab.theta_a(l, n) * tab.S(l, n);
  CHECK(std::abs(norm_tab - rdsim::braket(st, st)) < 1e-12);
  CHECK(norm_tab.imag() == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("initial state puts all weight on branch 1 with unit norm") {
  const auto st = rdsim::initial_state(4, 3, 20.0, 1e-3, 1234);
  CHECK(st.D(0) == cplx{1.0, 0.0});
  CHECK(st.A(0) == cplx{0.0, 0.0});
  CHECK(st.mu(0) == cplx{std::sqrt(20.0), 0.0});
  // the occupied branch is exact: no jitter on its unused displacements
  CHECK(st.nu(0) == cplx{0.0, 0.0});
  CHECK(st.eta(0, 2) == cplx{0.0, 0.0});
  for (int n = 1; n < 4; ++n) {
    CHECK(st.A(n) == cplx{0.0, 0.0});
    CHECK(st.D(n) == cplx{0.0, 0.0});
    CHECK(std::abs(st.mu(n)) > 0.0);
    CHECK(std::abs(st.mu(n)) < 1e-2);
  }
  // dormant branches carry zero amplitude, so the norm is exactly 1
  rdsim::DiscretizedBath bath = toy_bath(3);
  const auto tab = rdsim::build_overlap_tables(st, bath);
  cplx norm{0.0, 0.0};
  for (int l = 0; l < 4; ++l)
    for (int n = 0; n < 4; ++n) norm += tab.theta_a(l, n) * tab.S(l, n);
  CHECK(std::abs(norm - cplx{1.0, 0.0}) < 1e-15);

  // same seed, same jitter; different seed, different jitter
  const auto st2 = rdsim::initial_state(4, 3, 20.0, 1e-3, 1234);
  CHECK(st2.nu(2) == st.nu(2));
  const auto st3 = rdsim::initial_state(4, 3, 20.0, 1e-3, 99);
  CHECK(st3.nu(2) != st.nu(2));

  // zero noise leaves every other parameter exactly zero
  const auto quiet = rdsim::initial_state(3, 2, 4.0, 0.0, 7);
  CHECK(quiet.mu(1) == cplx{0.0, 0.0});
  CHECK(quiet.eta(2, 1) == cplx{0.0, 0.0});
}

TEST_CASE("checkpoint round-trips every parameter bit-exactly") {
  std::mt19937_64 rng(53);
  const auto st = random_state(rng, 3, 5, 0.8);
  const std::string path = "/tmp/rdsim_test_checkpoint.txt";
  rdsim::write_checkpoint(path, 12.625, st);
  const auto [t, back] = rdsim::read_checkpoint(path, 3, 5);
  CHECK(t == 12.625);
  CHECK(back.flatten() == st.flatten());
  std::remove(path.c_str());

  CHECK_THROWS_AS(rdsim::read_checkpoint(path, 3, 5), std::runtime_error);
  rdsim::write_checkpoint(path, 1.0, st);
  CHECK_THROWS_AS(rdsim::read_checkpoint(path, 4, 5), std::runtime_error);
  std::remove(path.c_str());
}
