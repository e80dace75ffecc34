// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"
#include "oscswap/rk4.hpp"

namespace oscswap::simd::avx2 {

namespace {

// Two interleaved complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void scale_row(cplx* psi, cplx s, const cplx* a, const cplx* b, std::size_t n) {
  auto* p = reinterpret_cast<double*>(psi);
  const auto* pa = reinterpret_cast<const double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  const __m256d vs = _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
  std::size_t j = 0;
  if (b == nullptr) {
    for (; j + 2 <= n; j += 2) {
      const __m256d f = cmul(vs, _mm256_loadu_pd(pa + 2 * j));
      _mm256_storeu_pd(p + 2 * j, cmul(_mm256_loadu_pd(p + 2 * j), f));
    }
    for (; j < n; ++j) psi[j] *= s * a[j];
    return;
  }
  for (; j + 2 <= n; j += 2) {
    const __m256d f = cmul(cmul(vs, _mm256_loadu_pd(pa + 2 * j)), _mm256_loadu_pd(pb + 2 * j));
    _mm256_storeu_pd(p + 2 * j, cmul(_mm256_loadu_pd(p + 2 * j), f));
  }
  for (; j < n; ++j) psi[j] *= s * a[j] * b[j];
}

double sum_abs2(const cplx* psi, std::size_t n) {
  const auto* p = reinterpret_cast<const double*>(psi);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v0 = _mm256_loadu_pd(p + 2 * j);
    const __m256d v1 = _mm256_loadu_pd(p + 2 * j + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) acc += std::norm(psi[j]);
  return acc;
}

double weighted_abs2(const cplx* psi, const double* w, std::size_t n) {
  const auto* p = reinterpret_cast<const double*>(psi);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d v = _mm256_loadu_pd(p + 2 * j);
    // [w0, w0, w1, w1]
    const __m128d w2 = _mm_loadu_pd(w + j);
    const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), ww, acc);
  }
  double total = hsum(acc);
  for (; j < n; ++j) total += w[j] * std::norm(psi[j]);
  return total;
}

void rk4_batch(double* x, double* y, double* px, double* py, std::size_t n, const SymMat2& m0,
               const SymMat2& mh, const SymMat2& m1, double h) {
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d vh2 = _mm256_set1_pd(0.5 * h);
  const __m256d vh6 = _mm256_set1_pd(h / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d a0 = _mm256_set1_pd(-m0.a11), b0 = _mm256_set1_pd(-m0.a12),
                c0 = _mm256_set1_pd(-m0.a22);
  const __m256d ah = _mm256_set1_pd(-mh.a11), bh = _mm256_set1_pd(-mh.a12),
                ch = _mm256_set1_pd(-mh.a22);
  const __m256d a1 = _mm256_set1_pd(-m1.a11), b1 = _mm256_set1_pd(-m1.a12),
                c1 = _mm256_set1_pd(-m1.a22);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d X = _mm256_loadu_pd(x + i);
    const __m256d Y = _mm256_loadu_pd(y + i);
    const __m256d PX = _mm256_loadu_pd(px + i);
    const __m256d PY = _mm256_loadu_pd(py + i);

    const __m256d k1px = _mm256_fmadd_pd(a0, X, _mm256_mul_pd(b0, Y));
    const __m256d k1py = _mm256_fmadd_pd(b0, X, _mm256_mul_pd(c0, Y));

    const __m256d x2 = _mm256_fmadd_pd(vh2, PX, X);
    const __m256d y2 = _mm256_fmadd_pd(vh2, PY, Y);
    const __m256d px2 = _mm256_fmadd_pd(vh2, k1px, PX);
    const __m256d py2 = _mm256_fmadd_pd(vh2, k1py, PY);
    const __m256d k2px = _mm256_fmadd_pd(ah, x2, _mm256_mul_pd(bh, y2));
    const __m256d k2py = _mm256_fmadd_pd(bh, x2, _mm256_mul_pd(ch, y2));

    const __m256d x3 = _mm256_fmadd_pd(vh2, px2, X);
    const __m256d y3 = _mm256_fmadd_pd(vh2, py2, Y);
    const __m256d px3 = _mm256_fmadd_pd(vh2, k2px, PX);
    const __m256d py3 = _mm256_fmadd_pd(vh2, k2py, PY);
    const __m256d k3px = _mm256_fmadd_pd(ah, x3, _mm256_mul_pd(bh, y3));
    const __m256d k3py = _mm256_fmadd_pd(bh, x3, _mm256_mul_pd(ch, y3));

    const __m256d x4 = _mm256_fmadd_pd(vh, px3, X);
    const __m256d y4 = _mm256_fmadd_pd(vh, py3, Y);
    const __m256d px4 = _mm256_fmadd_pd(vh, k3px, PX);
    const __m256d py4 = _mm256_fmadd_pd(vh, k3py, PY);
    const __m256d k4px = _mm256_fmadd_pd(a1, x4, _mm256_mul_pd(b1, y4));
    const __m256d k4py = _mm256_fmadd_pd(b1, x4, _mm256_mul_pd(c1, y4));

    const __m256d sx = _mm256_add_pd(_mm256_add_pd(PX, px4), _mm256_mul_pd(two, _mm256_add_pd(px2, px3)));
    const __m256d sy = _mm256_add_pd(_mm256_add_pd(PY, py4), _mm256_mul_pd(two, _mm256_add_pd(py2, py3)));
    const __m256d spx =
        _mm256_add_pd(_mm256_add_pd(k1px, k4px), _mm256_mul_pd(two, _mm256_add_pd(k2px, k3px)));
    const __m256d spy =
        _mm256_add_pd(_mm256_add_pd(k1py, k4py), _mm256_mul_pd(two, _mm256_add_pd(k2py, k3py)));

    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(vh6, sx, X));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vh6, sy, Y));
    _mm256_storeu_pd(px + i, _mm256_fmadd_pd(vh6, spx, PX));
    _mm256_storeu_pd(py + i, _mm256_fmadd_pd(vh6, spy, PY));
  }
  for (; i < n; ++i) detail::rk4_linear_step(x[i], y[i], px[i], py[i], m0, mh, m1, h);
}

}  // namespace oscswap::simd::avx2
