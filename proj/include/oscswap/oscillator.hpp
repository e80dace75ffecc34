#pragma once

// Harmonic-oscillator eigenfunctions and Fock-state Wigner functions
// (hbar = m = 1).

#include <span>
#include <vector>

namespace oscswap {

/// phi_0..phi_nmax at a single point, by the stable three-term recurrence.
void ho_eigenfunctions_at(int nmax, double omega, double x, std::span<double> out);

/// Normalised phi_n(x) on the given nodes. Throws ResolutionError when the
/// node spacing gives fewer than 4 nodes per local oscillation.
std::vector<double> ho_eigenfunction(int n, double omega, std::span<const double> x);

double laguerre(int n, double x);

/// W_n(x, p) = ((-1)^n / pi) exp(-(w x^2 + p^2 / w)) L_n(2 (w x^2 + p^2 / w))
double wigner_fock(int n, double omega, double x, double p);

}  // namespace oscswap
