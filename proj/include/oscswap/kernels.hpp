#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2/FMA variant picked at runtime.

#include <cstddef>

#include "oscswap/mat2.hpp"

namespace oscswap::simd {

struct KernelTable {
  const char* name;
  /// psi[j] *= s * a[j] * b[j]; `b` may be null.
  void (*scale_row)(cplx* psi, cplx s, const cplx* a, const cplx* b, std::size_t n);
  /// sum_j |psi[j]|^2
  double (*sum_abs2)(const cplx* psi, std::size_t n);
  /// sum_j w[j] |psi[j]|^2
  double (*weighted_abs2)(const cplx* psi, const double* w, std::size_t n);
  /// One classical RK4 step of x'' = -M x for a batch of real phase-space
  /// points stored as separate x, y, px, py arrays. M is given at the start,
  /// midpoint and end of the step.
  void (*rk4_batch)(double* x, double* y, double* px, double* py, std::size_t n,
                    const SymMat2& m0, const SymMat2& mh, const SymMat2& m1, double h);
};

const KernelTable& scalar_kernels();

/// Null when the binary was built without AVX2 support or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Kernel set used by the library. OSCSWAP_SIMD=scalar|avx2|auto overrides
/// the default (auto).
const KernelTable& active_kernels();

}  // namespace oscswap::simd
