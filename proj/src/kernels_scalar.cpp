#include "kernels_impl.hpp"
#include "oscswap/rk4.hpp"

namespace oscswap::simd::scalar {

void scale_row(cplx* psi, cplx s, const cplx* a, const cplx* b, std::size_t n) {
  if (b == nullptr) {
    for (std::size_t j = 0; j < n; ++j) psi[j] *= s * a[j];
    return;
  }
  for (std::size_t j = 0; j < n; ++j) psi[j] *= s * a[j] * b[j];
}

double sum_abs2(const cplx* psi, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += std::norm(psi[j]);
  return acc;
}

double weighted_abs2(const cplx* psi, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += w[j] * std::norm(psi[j]);
  return acc;
}

void rk4_batch(double* x, double* y, double* px, double* py, std::size_t n, const SymMat2& m0,
               const SymMat2& mh, const SymMat2& m1, double h) {
  for (std::size_t i = 0; i < n; ++i) detail::rk4_linear_step(x[i], y[i], px[i], py[i], m0, mh, m1, h);
}

}  // namespace oscswap::simd::scalar
