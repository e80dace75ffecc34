#pragma once

// Checks shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oscswap/protocol.hpp"

namespace oscswap::testing {

struct RandomProtocol {
  double tf;
  double lambda;
};

/// Fixed-seed draws with tf in [1, 6] and lambda in [0, 40].
inline std::vector<RandomProtocol> random_protocols(int count, unsigned seed = 2024) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tf(1.0, 6.0);
  std::uniform_real_distribution<double> lambda(0.0, 40.0);
  std::vector<RandomProtocol> out;
  for (int i = 0; i < count; ++i) {
    const double a = tf(rng);
    out.push_back({a, lambda(rng)});
  }
  return out;
}

struct DesignValidity {
  double reality = 0.0;       // worst relative non-real / asymmetric part of M
  double boundary = 0.0;      // worst |M - target| at t = 0 and t = tf
  double theta_end = 0.0;     // |theta(tf) - gamma|
  double theta_jump = 0.0;    // largest step of theta between samples
  double invariance = 0.0;    // worst relative residual of dGamma/dt
};

/// Largest entry-wise residual of the invariance condition, finite
/// differences (five-point stencil) of Gamma built from U on a fine grid,
/// relative to max(1, |dGamma/dt|).
inline double invariance_residual(const ProtocolSpec& spec, int intervals = 4000,
                                  int probes = 40) {
  std::vector<double> grid(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) grid[static_cast<std::size_t>(i)] = spec.tf * i / intervals;
  const std::vector<CMat2> u = integrate_unitary(spec, grid);
  const double h = spec.tf / intervals;
  auto gamma_at = [&](int i) {
    const DesignPoint d = design_at(spec, grid[static_cast<std::size_t>(i)]);
    return assemble_invariant_matrix(d.r.R, d.r.dR, d.A, u[static_cast<std::size_t>(i)]);
  };
  double worst = 0.0;
  for (int p = 1; p <= probes; ++p) {
    const int i = 2 + (intervals - 4) * p / (probes + 1);
    const Mat4 gm2 = gamma_at(i - 2), gm1 = gamma_at(i - 1), gp1 = gamma_at(i + 1),
               gp2 = gamma_at(i + 2), g0 = gamma_at(i);
    const Mat4 rhs = invariance_rhs(potential_at(spec, grid[static_cast<std::size_t>(i)]), g0);
    double scale = 1.0;
    for (double v : rhs.v) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < 16; ++k) {
      const double fd = (gm2.v[k] - 8.0 * gm1.v[k] + 8.0 * gp1.v[k] - gp2.v[k]) / (12.0 * h);
      worst = std::max(worst, std::abs(fd - rhs.v[k]) / scale);
    }
  }
  return worst;
}

inline DesignValidity design_validity(const ProtocolSpec& spec, int samples = 2001) {
  DesignValidity v;
  for (int i = 0; i < samples; ++i) {
    const double t = spec.tf * i / (samples - 1);
    const RValue r = eval_R(spec, t);
    const RMat2 J = solve_coupling_J(r.R, r.dR, t);
    const CMat2 A = compute_A(r.R, r.dR, J, t);
    const CMat2 m = solve_M_raw(r.R, r.dR, r.ddR, A, t);
    const RMat2 re = real_part(m);
    const double scale = std::max(1.0, max_abs(re));
    v.reality = std::max(v.reality,
                         std::max(max_abs(imag_part(m)), std::abs(re.m01 - re.m10)) / scale);
  }
  v.boundary = std::max(max_abs(potential_at(spec, 0.0) - spec.initial_potential()),
                        max_abs(potential_at(spec, spec.tf) - spec.final_potential()));
  const ProtocolTable table = tabulate_protocol(spec, samples);
  v.theta_end = std::abs(table.samples.back().frame.theta - spec.gamma);
  for (std::size_t i = 1; i < table.samples.size(); ++i)
    v.theta_jump = std::max(v.theta_jump, std::abs(table.samples[i].frame.theta -
                                                   table.samples[i - 1].frame.theta));
  v.invariance = invariance_residual(spec);
  return v;
}

}  // namespace oscswap::testing
