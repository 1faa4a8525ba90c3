// AVX2+FMA variants of the inner-loop kernels.  Complex arrays are interleaved
// (re, im) pairs, so one 256-bit register holds two complex numbers.  Products
// against a conjugated factor are split into an even-lane (real-part) and an
// odd-lane (imaginary-part) accumulator; signs are fixed once at the end with
// an odd-lane sign mask instead of per-iteration shuffles.
//
// This translation unit is the only one compiled with -mavx2 -mfma; callers
// reach it through the dispatch table after a runtime CPU check.

#include "rdsim/kernels.hpp"

#ifdef RDSIM_HAVE_AVX2

#include <immintrin.h>

namespace rdsim::kernels {
namespace {

// Sign mask that flips the imaginary (odd) lanes.
inline __m256d odd_neg() { return _mm256_setr_pd(0.0, -0.0, 0.0, -0.0); }

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// [re, im] = (lane0+lane2, lane1+lane3)
inline cplx hsum_pairs(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  double out[2];
  _mm_storeu_pd(out, lo);
  return {out[0], out[1]};
}

// Duplicate two consecutive weights into [w0, w0, w1, w1].
inline __m256d dup2(const double* w) {
  __m256d t = _mm256_castpd128_pd256(_mm_loadu_pd(w));
  return _mm256_permute4x64_pd(t, 0x50);
}

const double* dptr(const cplx* p) { return reinterpret_cast<const double*>(p); }
double* dptr(cplx* p) { return reinterpret_cast<double*>(p); }

cplx v_cdotc(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d av = _mm256_loadu_pd(dptr(a + i));
    __m256d bv = _mm256_loadu_pd(dptr(b + i));
    __m256d bs = _mm256_permute_pd(bv, 0x5);
    acc_re = _mm256_fmadd_pd(av, bv, acc_re);
    acc_im = _mm256_fmadd_pd(av, bs, acc_im);
  }
  cplx acc{hsum4(acc_re), hsum4(_mm256_xor_pd(acc_im, odd_neg()))};
  for (std::size_t i = nv; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

cplx v_cdotc_rw(const double* w, const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d av = _mm256_loadu_pd(dptr(a + i));
    __m256d bv = _mm256_loadu_pd(dptr(b + i));
    __m256d wv = dup2(w + i);
    __m256d bs = _mm256_permute_pd(bv, 0x5);
    acc_re = _mm256_fmadd_pd(_mm256_mul_pd(av, bv), wv, acc_re);
    acc_im = _mm256_fmadd_pd(_mm256_mul_pd(av, bs), wv, acc_im);
  }
  cplx acc{hsum4(acc_re), hsum4(_mm256_xor_pd(acc_im, odd_neg()))};
  for (std::size_t i = nv; i < n; ++i) acc += w[i] * std::conj(a[i]) * b[i];
  return acc;
}

cplx v_cdot_rw(const double* w, const cplx* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2)
    acc = _mm256_fmadd_pd(dup2(w + i), _mm256_loadu_pd(dptr(b + i)), acc);
  cplx out = hsum_pairs(acc);
  for (std::size_t i = nv; i < n; ++i) out += w[i] * b[i];
  return out;
}

double v_sum_abs2(const cplx* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d av = _mm256_loadu_pd(dptr(a + i));
    acc = _mm256_fmadd_pd(av, av, acc);
  }
  double out = hsum4(acc);
  for (std::size_t i = nv; i < n; ++i) out += std::norm(a[i]);
  return out;
}

void v_caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_setr_pd(-alpha.imag(), alpha.imag(), -alpha.imag(), alpha.imag());
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d xv = _mm256_loadu_pd(dptr(x + i));
    __m256d yv = _mm256_loadu_pd(dptr(y + i));
    yv = _mm256_fmadd_pd(ar, xv, yv);
    yv = _mm256_fmadd_pd(ai, _mm256_permute_pd(xv, 0x5), yv);
    _mm256_storeu_pd(dptr(y + i), yv);
  }
  for (std::size_t i = nv; i < n; ++i) y[i] += alpha * x[i];
}

void v_caxpy_rx(cplx alpha, const double* x, cplx* y, std::size_t n) {
  const __m256d av = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d yv = _mm256_loadu_pd(dptr(y + i));
    yv = _mm256_fmadd_pd(av, dup2(x + i), yv);
    _mm256_storeu_pd(dptr(y + i), yv);
  }
  for (std::size_t i = nv; i < n; ++i) y[i] += alpha * x[i];
}

void v_cmuladd_conj(cplx alpha, const cplx* a, const cplx* b, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_setr_pd(-alpha.imag(), alpha.imag(), -alpha.imag(), alpha.imag());
  const __m256d neg = odd_neg();
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d av = _mm256_loadu_pd(dptr(a + i));
    __m256d bv = _mm256_loadu_pd(dptr(b + i));
    __m256d bs = _mm256_permute_pd(bv, 0x5);
    // c = conj(a) * b, interleaved via horizontal add of the two lane products
    __m256d t1 = _mm256_mul_pd(av, bv);
    __m256d t2 = _mm256_xor_pd(_mm256_mul_pd(av, bs), neg);
    __m256d c = _mm256_hadd_pd(t1, t2);
    __m256d yv = _mm256_loadu_pd(dptr(y + i));
    yv = _mm256_fmadd_pd(ar, c, yv);
    yv = _mm256_fmadd_pd(ai, _mm256_permute_pd(c, 0x5), yv);
    _mm256_storeu_pd(dptr(y + i), yv);
  }
  for (std::size_t i = nv; i < n; ++i) y[i] += alpha * std::conj(a[i]) * b[i];
}

void v_conj_combine(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const __m256d neg = odd_neg();
  const __m256d half = _mm256_set1_pd(0.5);
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d an = _mm256_xor_pd(_mm256_loadu_pd(dptr(a + i)), neg);
    __m256d bn = _mm256_xor_pd(_mm256_loadu_pd(dptr(b + i)), neg);
    _mm256_storeu_pd(dptr(out + i), _mm256_fnmadd_pd(half, bn, an));
  }
  for (std::size_t i = nv; i < n; ++i) out[i] = std::conj(a[i]) - 0.5 * std::conj(b[i]);
}

void v_lincomb4_d(double* y, const double* x0, double c1, const double* k1,
                  double c2, const double* k2, double c3, const double* k3,
                  double c4, const double* k4, std::size_t n) {
  const __m256d c1v = _mm256_set1_pd(c1), c2v = _mm256_set1_pd(c2);
  const __m256d c3v = _mm256_set1_pd(c3), c4v = _mm256_set1_pd(c4);
  const std::size_t nv = n & ~std::size_t(3);
  for (std::size_t i = 0; i < nv; i += 4) {
    __m256d v = _mm256_loadu_pd(x0 + i);
    v = _mm256_fmadd_pd(c1v, _mm256_loadu_pd(k1 + i), v);
    v = _mm256_fmadd_pd(c2v, _mm256_loadu_pd(k2 + i), v);
    v = _mm256_fmadd_pd(c3v, _mm256_loadu_pd(k3 + i), v);
    v = _mm256_fmadd_pd(c4v, _mm256_loadu_pd(k4 + i), v);
    _mm256_storeu_pd(y + i, v);
  }
  for (std::size_t i = nv; i < n; ++i)
    y[i] = x0[i] + c1 * k1[i] + c2 * k2[i] + c3 * k3[i] + c4 * k4[i];
}

void v_axpy_d(double* y, const double* x, double a, const double* k, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const std::size_t nv = n & ~std::size_t(3);
  for (std::size_t i = 0; i < nv; i += 4) {
    __m256d v = _mm256_fmadd_pd(av, _mm256_loadu_pd(k + i), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, v);
  }
  for (std::size_t i = nv; i < n; ++i) y[i] = x[i] + a * k[i];
}

void v_real_embed_col(const cplx* Lcol, const cplx* Kcol, double* outa,
                      double* outb, std::size_t n) {
  const __m128d neg128 = _mm_set1_pd(-0.0);
  const std::size_t nv = n & ~std::size_t(1);
  for (std::size_t i = 0; i < nv; i += 2) {
    __m256d L = _mm256_loadu_pd(dptr(Lcol + i));
    __m256d K = _mm256_loadu_pd(dptr(Kcol + i));
    __m256d p = _mm256_add_pd(L, K);
    __m256d m = _mm256_sub_pd(L, K);
    // 0x8 gathers even lanes into the low half, 0xD gathers odd lanes.
    _mm_storeu_pd(outa + i, _mm256_castpd256_pd128(_mm256_permute4x64_pd(p, 0x8)));
    _mm_storeu_pd(outa + n + i, _mm256_castpd256_pd128(_mm256_permute4x64_pd(p, 0xD)));
    _mm_storeu_pd(outb + i,
                  _mm_xor_pd(_mm256_castpd256_pd128(_mm256_permute4x64_pd(m, 0xD)), neg128));
    _mm_storeu_pd(outb + n + i, _mm256_castpd256_pd128(_mm256_permute4x64_pd(m, 0x8)));
  }
  for (std::size_t i = nv; i < n; ++i) {
    const cplx p = Lcol[i] + Kcol[i];
    const cplx m = Lcol[i] - Kcol[i];
    outa[i] = p.real();
    outa[n + i] = p.imag();
    outb[i] = -m.imag();
    outb[n + i] = m.real();
  }
}

}  // namespace

const Ops* avx2_ops_table() {
  static const Ops ops = {
      v_cdotc,     v_cdotc_rw,     v_cdot_rw,      v_sum_abs2,
      v_caxpy,     v_caxpy_rx,     v_cmuladd_conj, v_conj_combine,
      v_lincomb4_d, v_axpy_d,      v_real_embed_col,
      "avx2",
  };
  return &ops;
}

}  // namespace rdsim::kernels

#endif  // RDSIM_HAVE_AVX2
