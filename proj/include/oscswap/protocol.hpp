#pragma once

// Inverse engineering of the time-dependent potential matrix M(t) from the
// interpolated invariant matrix R(t).

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "oscswap/mat2.hpp"

namespace oscswap {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kNoTime = std::numeric_limits<double>::quiet_NaN();

/// Design input: boundary oscillators, duration, control parameter and final
/// rotation angle, plus the derived boundary values of R.
struct ProtocolSpec {
  double w1 = 1.0;
  double w2 = 1.0;
  double tf = 1.0;
  double lambda = 0.0;
  double gamma = kHalfPi;
  SymMat2 R0;
  SymMat2 Rf;
  SymMat2 Rc;

  SymMat2 initial_potential() const { return {w1 * w1, 0.0, w2 * w2}; }
  SymMat2 final_potential() const { return from_principal(gamma, w1 * w1, w2 * w2); }

  /// Angle of the frame in which the final trap is diag(w2^2, w1^2); zero
  /// for the quarter-turn protocol, so the frame is the lab frame there.
  double final_frame_angle() const { return gamma - kHalfPi; }
  /// Final normal-mode frequencies along the final frame's x and y axes.
  std::pair<double, double> final_mode_frequencies() const { return {w2, w1}; }
};

ProtocolSpec build_spec(double w1, double w2, double tf, double lambda, double gamma = kHalfPi);

struct RValue {
  SymMat2 R;
  SymMat2 dR;
  SymMat2 ddR;
};

/// R(t) = (1 - p) R0 + p Rf + s Rc with p the minimum-jerk quintic and
/// s = (t/tf)^3 (1 - t/tf)^3; derivatives are analytic.
RValue eval_R(const ProtocolSpec& spec, double t);

/// Solves {J, R^-2} = [dR, R^-1] + [R, R^-2]_dR. J comes out antisymmetric.
RMat2 solve_coupling_J(const SymMat2& R, const SymMat2& dR, double t = kNoTime);

/// A = i R^-2 + [R^-1, dR]/2 + R^-1 J R^-1 / 2
CMat2 compute_A(const SymMat2& R, const SymMat2& dR, const RMat2& J, double t = kNoTime);

/// Solves {ddR, R} + {R^2, M} = 2 [dR, R]_A - 2 R A^2 R for M and projects it
/// onto a real symmetric matrix. Throws DesignViolation if the solution is
/// not real-symmetric to within `reality_tol` (relative to max(1, |M|)).
SymMat2 compute_M(const SymMat2& R, const SymMat2& dR, const SymMat2& ddR, const CMat2& A,
                  double t = kNoTime, double reality_tol = 1e-10);

/// Raw (unprojected) solution of the M equation, for diagnostics.
CMat2 solve_M_raw(const SymMat2& R, const SymMat2& dR, const SymMat2& ddR, const CMat2& A,
                  double t = kNoTime);

/// Everything the design pipeline produces at one instant.
struct DesignPoint {
  RValue r;
  RMat2 J;
  CMat2 A;
  SymMat2 M;
};

DesignPoint design_at(const ProtocolSpec& spec, double t);
SymMat2 potential_at(const ProtocolSpec& spec, double t);

struct FrameDecomposition {
  double theta = 0.0;
  double omega1_sq = 0.0;
  double omega2_sq = 0.0;

  SymMat2 reconstruct() const { return from_principal(theta, omega1_sq, omega2_sq); }
};

/// Principal-axis decomposition on the branch closest to `theta_prev`.
FrameDecomposition decompose_potential(const SymMat2& M, double theta_prev);

struct ProtocolSample {
  double t = 0.0;
  SymMat2 M;
  FrameDecomposition frame;

  /// Some principal curvature is negative: the trap is a saddle here.
  bool repeller() const { return frame.omega1_sq < 0.0 || frame.omega2_sq < 0.0; }
  /// Instantaneous level energy omega1 (n + 1/2) + omega2 (k + 1/2); empty on repeller rows.
  std::optional<double> level_energy(int n, int k) const;
};

struct ProtocolTable {
  ProtocolSpec spec;
  std::vector<ProtocolSample> samples;
};

ProtocolTable tabulate_protocol(const ProtocolSpec& spec, int n_samples = 2001);

/// Samples at the given ascending times; the principal-axis branch is
/// followed continuously from t = 0.
ProtocolTable tabulate_protocol_at(const ProtocolSpec& spec, std::span<const double> times);

/// U(t) on `t_grid` solving dU/dt = U A with U(0) = 1, classical RK4 per interval.
std::vector<CMat2> integrate_unitary(const ProtocolSpec& spec, std::span<const double> t_grid);

struct Mat4 {
  std::array<double, 16> v{};
  double operator()(int i, int j) const { return v[4 * i + j]; }
  double& operator()(int i, int j) { return v[4 * i + j]; }
};

/// Quadratic-invariant matrix Gamma = Re[[dP^+ dP, -dP^+ P], [-P^+ dP, P^+ P]]
/// with P = U R and dP = U (A R + dR).
Mat4 assemble_invariant_matrix(const SymMat2& R, const SymMat2& dR, const CMat2& A,
                               const CMat2& U);

/// Right-hand side of the invariance condition, Omega S Gamma - Gamma S Omega.
Mat4 invariance_rhs(const SymMat2& M, const Mat4& gamma);

/// Time-dependent potential matrix driving the dynamics over [0, duration].
class PotentialSchedule {
 public:
  using Fn = std::function<SymMat2(double)>;

  PotentialSchedule(double duration, Fn fn);

  static PotentialSchedule designed(const ProtocolSpec& spec);
  static PotentialSchedule constant(const SymMat2& m, double duration);

  double duration() const { return duration_; }
  SymMat2 operator()(double t) const { return fn_(t); }

  /// M at t_k = k * duration / (2 steps), k = 0..2 steps: the nodes an RK4
  /// integrator with `steps` uniform steps touches.
  std::vector<SymMat2> half_step_nodes(int steps) const;

 private:
  double duration_;
  Fn fn_;
};

}  // namespace oscswap
