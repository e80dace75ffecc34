#include "oscswap/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oscswap/error.hpp"

namespace oscswap {

void ho_eigenfunctions_at(int nmax, double omega, double x, std::span<double> out) {
  const double s = std::sqrt(omega) * x;
  double prev = 0.0;
  double cur = std::pow(omega / std::numbers::pi, 0.25) * std::exp(-0.5 * s * s);
  out[0] = cur;
  for (int n = 0; n < nmax; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * s * cur - std::sqrt(double(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    out[static_cast<std::size_t>(n) + 1] = cur;
  }
}

std::vector<double> ho_eigenfunction(int n, double omega, std::span<const double> x) {
  if (!(omega > 0.0)) throw InvalidInput("oscillator frequency must be positive");
  if (n < 0) throw InvalidInput("quantum number must be non-negative");
  if (x.size() > 1) {
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) spacing = std::min(spacing, std::abs(x[i] - x[i - 1]));
    const double wavelength = 2.0 * std::numbers::pi / std::sqrt(omega * (2.0 * n + 1.0));
    if (wavelength / spacing < 4.0)
      throw ResolutionError("grid too coarse for oscillator level n=" + std::to_string(n));
  }
  std::vector<double> out(x.size());
  std::vector<double> buf(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ho_eigenfunctions_at(n, omega, x[i], buf);
    out[i] = buf.back();
  }
  return out;
}

double laguerre(int n, double x) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double wigner_fock(int n, double omega, double x, double p) {
  if (!(omega > 0.0)) throw InvalidInput("oscillator frequency must be positive");
  const double r = omega * x * x + p * p / omega;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign / std::numbers::pi * std::exp(-r) * laguerre(n, 2.0 * r);
}

}  // namespace oscswap
