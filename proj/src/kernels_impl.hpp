#pragma once

#include "oscswap/kernels.hpp"

namespace oscswap::simd {

namespace scalar {
void scale_row(cplx* psi, cplx s, const cplx* a, const cplx* b, std::size_t n);
double sum_abs2(const cplx* psi, std::size_t n);
double weighted_abs2(const cplx* psi, const double* w, std::size_t n);
void rk4_batch(double* x, double* y, double* px, double* py, std::size_t n, const SymMat2& m0,
               const SymMat2& mh, const SymMat2& m1, double h);
}  // namespace scalar

#if defined(OSCSWAP_HAVE_AVX2)
namespace avx2 {
void scale_row(cplx* psi, cplx s, const cplx* a, const cplx* b, std::size_t n);
double sum_abs2(const cplx* psi, std::size_t n);
double weighted_abs2(const cplx* psi, const double* w, std::size_t n);
void rk4_batch(double* x, double* y, double* px, double* py, std::size_t n, const SymMat2& m0,
               const SymMat2& mh, const SymMat2& m1, double h);
}  // namespace avx2
#endif

}  // namespace oscswap::simd
