// Reference implementations of the inner-loop kernels.  These are the
// correctness baseline: the vectorized variants are tested against them.

#include "rdsim/kernels.hpp"

namespace rdsim::kernels {
namespace {

cplx s_cdotc(const cplx* a, const cplx* b, std::size_t n) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

cplx s_cdotc_rw(const double* w, const cplx* a, const cplx* b, std::size_t n) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::conj(a[i]) * b[i];
  return acc;
}

cplx s_cdot_rw(const double* w, const cplx* b, std::size_t n) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * b[i];
  return acc;
}

double s_sum_abs2(const cplx* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(a[i]);
  return acc;
}

void s_caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_caxpy_rx(cplx alpha, const double* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_cmuladd_conj(cplx alpha, const cplx* a, const cplx* b, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * std::conj(a[i]) * b[i];
}

void s_conj_combine(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::conj(a[i]) - 0.5 * std::conj(b[i]);
}

void s_lincomb4_d(double* y, const double* x0, double c1, const double* k1,
                  double c2, const double* k2, double c3, const double* k3,
                  double c4, const double* k4, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = x0[i] + c1 * k1[i] + c2 * k2[i] + c3 * k3[i] + c4 * k4[i];
}

void s_axpy_d(double* y, const double* x, double a, const double* k, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
}

void s_real_embed_col(const cplx* Lcol, const cplx* Kcol, double* outa,
                      double* outb, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx p = Lcol[i] + Kcol[i];
    const cplx m = Lcol[i] - Kcol[i];
    outa[i] = p.real();
    outa[n + i] = p.imag();
    outb[i] = -m.imag();
    outb[n + i] = m.real();
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      s_cdotc,     s_cdotc_rw,     s_cdot_rw,      s_sum_abs2,
      s_caxpy,     s_caxpy_rx,     s_cmuladd_conj, s_conj_combine,
      s_lincomb4_d, s_axpy_d,      s_real_embed_col,
      "scalar",
  };
  return ops;
}

}  // namespace rdsim::kernels
