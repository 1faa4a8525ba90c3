#pragma once
// Small dense kernels used in the propagation inner loop: complex reductions
// over bath modes / branch pairs, stage combinations, and the complex-to-real
// column embedding of the tangent-space matrix.
//
// Each primitive comes in a scalar reference version and (on x86-64 with AVX2
// and FMA) a vectorized variant.  Selection happens at runtime through a
// function-pointer table so a single binary runs correctly on any host; the
// environment variable RDSIM_KERNELS ("scalar" or "avx2") forces a variant.

#include <complex>
#include <cstddef>

namespace rdsim::kernels {

using cplx = std::complex<double>;

struct Ops {
  // sum_i conj(a[i]) * b[i]
  cplx (*cdotc)(const cplx* a, const cplx* b, std::size_t n);
  // sum_i w[i] * conj(a[i]) * b[i], real weights
  cplx (*cdotc_rw)(const double* w, const cplx* a, const cplx* b, std::size_t n);
  // sum_i w[i] * b[i], real weights
  cplx (*cdot_rw)(const double* w, const cplx* b, std::size_t n);
  // sum_i |a[i]|^2
  double (*sum_abs2)(const cplx* a, std::size_t n);
  // y[i] += alpha * x[i]
  void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // y[i] += alpha * x[i], real x
  void (*caxpy_rx)(cplx alpha, const double* x, cplx* y, std::size_t n);
  // y[i] += alpha * conj(a[i]) * b[i]
  void (*cmuladd_conj)(cplx alpha, const cplx* a, const cplx* b, cplx* y, std::size_t n);
  // out[i] = conj(a[i]) - 0.5 * conj(b[i])
  void (*conj_combine)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // y[i] = x0[i] + c1*k1[i] + c2*k2[i] + c3*k3[i] + c4*k4[i], all real
  void (*lincomb4_d)(double* y, const double* x0, double c1, const double* k1,
                     double c2, const double* k2, double c3, const double* k3,
                     double c4, const double* k4, std::size_t n);
  // y[i] = x[i] + a * k[i], all real
  void (*axpy_d)(double* y, const double* x, double a, const double* k, std::size_t n);
  // Embed one complex column pair (L[:,j], K[:,j]) of the tangent equations
  // into two real columns of the doubled system:
  //   outa = [Re(L+K); Im(L+K)],  outb = [-Im(L-K); Re(L-K)]
  // outa/outb each hold 2n doubles.
  void (*real_embed_col)(const cplx* Lcol, const cplx* Kcol, double* outa,
                         double* outb, std::size_t n);
  const char* name;
};

// Kernel set in use, chosen on first call (thread-safe static init).
const Ops& active();

// Always-available reference implementations.
const Ops& scalar_ops();

// AVX2+FMA variants, or nullptr when not compiled in / not supported by the CPU.
const Ops* avx2_ops();

// True when avx2_ops() would return a usable table.
bool avx2_available();

}  // namespace rdsim::kernels
