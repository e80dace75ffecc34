#pragma once

// Linear invariants built from complex classical trajectories: transfer
// coefficients, the scalar b, and closed-form final-state and energy
// predictions.

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "oscswap/mat2.hpp"
#include "oscswap/protocol.hpp"

namespace oscswap {

inline constexpr int kDefaultTrajectorySteps = 10000;
inline constexpr double kPerfectTolerance = 1e-6;

struct TrajectoryState {
  cplx ux, uy;
  cplx vx, vy;
};

enum class InvariantMode { G1, G2 };

/// Starting point of the trajectory whose invariant equals a_x(0) (G1) or a_y(0) (G2).
TrajectoryState initial_conditions(InvariantMode mode, double w1, double w2);

/// Fixed-step RK4 from 0 to the schedule's duration, real and imaginary parts together.
TrajectoryState propagate_trajectory(const PotentialSchedule& drive, const TrajectoryState& start,
                                     int steps = kDefaultTrajectorySteps);
TrajectoryState propagate_trajectory(const ProtocolSpec& spec, const TrajectoryState& start,
                                     int steps = kDefaultTrajectorySteps);

/// Propagates several starting points through one shared set of potential nodes.
std::vector<TrajectoryState> propagate_trajectories(std::span<const SymMat2> half_step_nodes,
                                                    double duration,
                                                    std::span<const TrajectoryState> starts);

struct TransferCoeffs {
  cplx cx, cy;    // G1(tf) = cx a_x + cy a_y
  cplx cpx, cpy;  // G2(tf) = cpx a_x + cpy a_y
  double b = 0.0;
  std::optional<double> phi;        // arg(cy), only when b < kPerfectTolerance
  std::optional<double> phi_prime;  // arg(cpx)
  /// |v - i w u| at tf for (ux, uy, u'x, u'y).
  std::array<double, 4> final_value_residuals{};
};

/// Expands the final values of the G1/G2 trajectories over the final
/// annihilation operators. Trajectories are first rotated by W(frame_angle)
/// into the frame where the final trap is diag(wx_f^2, wy_f^2). Throws
/// IntegrationAccuracy when the coefficient matrix is not unitary to
/// `relation_tol`.
TransferCoeffs transfer_coefficients(const TrajectoryState& end1, const TrajectoryState& end2,
                                     double wx_f, double wy_f, double frame_angle = 0.0,
                                     double relation_tol = 1e-6);

/// build-spec -> G1, G2 trajectories -> coefficients.
TransferCoeffs transfer_coefficients(const ProtocolSpec& spec, int steps = kDefaultTrajectorySteps);

/// Only |cx|^2 = b: propagates the G1 trajectory alone.
double transfer_b(const ProtocolSpec& spec, int steps = kDefaultTrajectorySteps);

struct FockLabel {
  int n = 0;
  int k = 0;
  friend auto operator<=>(const FockLabel&, const FockLabel&) = default;
};

double initial_energy(const FockLabel& label, double w1, double w2);

/// <H(tf)> - E_nk(0) = b (n - k) (w2 - w1)
double predicted_energy_increment(const TransferCoeffs& coeffs, const FockLabel& label, double w1,
                                  double w2);

struct FinalStatePrediction {
  std::map<FockLabel, cplx> amplitudes;  // over final-frame labels |m, l>_f
  double norm() const;
};

/// Final state of |n, k>_i: [G1^+(tf)]^n [G2^+(tf)]^k |0,0>_f / sqrt(n! k!)
/// expanded as a binomial double sum.
FinalStatePrediction predicted_final_state(const TransferCoeffs& coeffs, const FockLabel& label);

struct ConsistencyReport {
  // |cx|^2+|c'x|^2-1, |cy|^2+|c'y|^2-1, |cx* cy + c'x* c'y|, |cx|^2+|cy|^2-1,
  // |c'x|^2+|c'y|^2-1, |cx|^2-|c'y|^2, |cy|^2-|c'x|^2 (absolute values)
  std::array<double, 7> relations{};
  std::array<double, 4> final_values{};
  double max_relation() const;
  double max() const;
};

ConsistencyReport consistency_residuals(const TransferCoeffs& coeffs);

/// C(n, k); exact integer arithmetic for n < 20, log-gamma above.
double binomial(int n, int k);

}  // namespace oscswap
