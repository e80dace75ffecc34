#include "oscswap/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oscswap/error.hpp"
#include "oscswap/rk4.hpp"

namespace oscswap {

TrajectoryState initial_conditions(InvariantMode mode, double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > 0.0)) throw InvalidInput("frequencies must be positive");
  const cplx i(0.0, 1.0);
  TrajectoryState s{};
  if (mode == InvariantMode::G1) {
    s.ux = i / std::sqrt(2.0 * w1);
    s.vx = -std::sqrt(0.5 * w1);
  } else {
    s.uy = i / std::sqrt(2.0 * w2);
    s.vy = -std::sqrt(0.5 * w2);
  }
  return s;
}

std::vector<TrajectoryState> propagate_trajectories(std::span<const SymMat2> nodes,
                                                    double duration,
                                                    std::span<const TrajectoryState> starts) {
  if (nodes.size() < 3 || nodes.size() % 2 == 0)
    throw InvalidInput("half-step node list must have 2 * steps + 1 entries");
  const std::size_t steps = (nodes.size() - 1) / 2;
  const double h = duration / static_cast<double>(steps);
  std::vector<TrajectoryState> out(starts.begin(), starts.end());
  for (std::size_t s = 0; s < steps; ++s) {
    const SymMat2& m0 = nodes[2 * s];
    const SymMat2& mh = nodes[2 * s + 1];
    const SymMat2& m1 = nodes[2 * s + 2];
    for (auto& st : out) detail::rk4_linear_step(st.ux, st.uy, st.vx, st.vy, m0, mh, m1, h);
  }
  for (const auto& st : out) {
    if (!std::isfinite(std::abs(st.ux)) || !std::isfinite(std::abs(st.uy)) ||
        !std::isfinite(std::abs(st.vx)) || !std::isfinite(std::abs(st.vy)))
      throw IntegrationAccuracy("trajectory diverged", std::numeric_limits<double>::infinity());
  }
  return out;
}

TrajectoryState propagate_trajectory(const PotentialSchedule& drive, const TrajectoryState& start,
                                     int steps) {
  if (steps < 1) throw InvalidInput("need at least one step");
  const auto nodes = drive.half_step_nodes(steps);
  return propagate_trajectories(nodes, drive.duration(), std::span(&start, 1)).front();
}

TrajectoryState propagate_trajectory(const ProtocolSpec& spec, const TrajectoryState& start,
                                     int steps) {
  return propagate_trajectory(PotentialSchedule::designed(spec), start, steps);
}

namespace {

cplx ipow(cplx base, int e) {
  cplx r(1.0, 0.0);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

TrajectoryState rotate(const TrajectoryState& s, double angle) {
  if (angle == 0.0) return s;
  const RMat2 w = rotation(angle);
  return {w.m00 * s.ux + w.m01 * s.uy, w.m10 * s.ux + w.m11 * s.uy,
          w.m00 * s.vx + w.m01 * s.vy, w.m10 * s.vx + w.m11 * s.vy};
}

}  // namespace

TransferCoeffs transfer_coefficients(const TrajectoryState& end1, const TrajectoryState& end2,
                                     double wx_f, double wy_f, double frame_angle,
                                     double relation_tol) {
  if (!(wx_f > 0.0) || !(wy_f > 0.0)) throw InvalidInput("final frequencies must be positive");
  const TrajectoryState a = rotate(end1, frame_angle);
  const TrajectoryState b = rotate(end2, frame_angle);
  const cplx mi(0.0, -1.0);
  const cplx i(0.0, 1.0);
  const double sx = std::sqrt(2.0 * wx_f);
  const double sy = std::sqrt(2.0 * wy_f);

  TransferCoeffs c;
  c.cx = mi * sx * a.ux;
  c.cy = mi * sy * a.uy;
  c.cpx = mi * sx * b.ux;
  c.cpy = mi * sy * b.uy;
  c.b = std::norm(c.cx);
  c.final_value_residuals = {std::abs(a.vx - i * wx_f * a.ux), std::abs(a.vy - i * wy_f * a.uy),
                             std::abs(b.vx - i * wx_f * b.ux), std::abs(b.vy - i * wy_f * b.uy)};
  if (c.b < kPerfectTolerance) {
    c.phi = std::arg(c.cy);
    c.phi_prime = std::arg(c.cpx);
  }
  const double worst = consistency_residuals(c).max_relation();
  if (!(worst <= relation_tol)) {
    std::ostringstream os;
    os << "transfer coefficients violate unitarity relations (residual " << worst
       << "); refine the integration step";
    throw IntegrationAccuracy(os.str(), worst);
  }
  return c;
}

TransferCoeffs transfer_coefficients(const ProtocolSpec& spec, int steps) {
  const auto nodes = PotentialSchedule::designed(spec).half_step_nodes(steps);
  const std::array starts{initial_conditions(InvariantMode::G1, spec.w1, spec.w2),
                          initial_conditions(InvariantMode::G2, spec.w1, spec.w2)};
  const auto ends = propagate_trajectories(nodes, spec.tf, starts);
  const auto [wx, wy] = spec.final_mode_frequencies();
  return transfer_coefficients(ends[0], ends[1], wx, wy, spec.final_frame_angle());
}

double transfer_b(const ProtocolSpec& spec, int steps) {
  const TrajectoryState end =
      propagate_trajectory(spec, initial_conditions(InvariantMode::G1, spec.w1, spec.w2), steps);
  const TrajectoryState r = rotate(end, spec.final_frame_angle());
  return 2.0 * spec.final_mode_frequencies().first * std::norm(r.ux);
}

double initial_energy(const FockLabel& label, double w1, double w2) {
  return (label.n + 0.5) * w1 + (label.k + 0.5) * w2;
}

double predicted_energy_increment(const TransferCoeffs& coeffs, const FockLabel& label, double w1,
                                  double w2) {
  return coeffs.b * static_cast<double>(label.n - label.k) * (w2 - w1);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  if (n < 20) {
    unsigned long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) / i;
    return static_cast<double>(r);
  }
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

double FinalStatePrediction::norm() const {
  double s = 0.0;
  for (const auto& [label, amp] : amplitudes) s += std::norm(amp);
  return std::sqrt(s);
}

FinalStatePrediction predicted_final_state(const TransferCoeffs& coeffs, const FockLabel& label) {
  const int n = label.n;
  const int k = label.k;
  if (n < 0 || k < 0) throw InvalidInput("quantum numbers must be non-negative");
  if (n + k > 64) throw InvalidInput("total quanta above 64 are not supported");
  const cplx c1 = std::conj(coeffs.cx);
  const cplx c2 = std::conj(coeffs.cy);
  const cplx d1 = std::conj(coeffs.cpx);
  const cplx d2 = std::conj(coeffs.cpy);

  FinalStatePrediction out;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= k; ++j) {
      const double weight = std::sqrt(binomial(n, i) * binomial(k, j) *
                                      binomial(n + k - i - j, k - j) * binomial(i + j, i));
      const cplx amp = weight * ipow(c1, n - i) * ipow(c2, i) * ipow(d1, k - j) * ipow(d2, j);
      out.amplitudes[{n + k - i - j, i + j}] += amp;
    }
  }
  return out;
}

double ConsistencyReport::max_relation() const {
  return *std::max_element(relations.begin(), relations.end());
}

double ConsistencyReport::max() const {
  return std::max(max_relation(), *std::max_element(final_values.begin(), final_values.end()));
}

ConsistencyReport consistency_residuals(const TransferCoeffs& c) {
  const double nx = std::norm(c.cx);
  const double ny = std::norm(c.cy);
  const double npx = std::norm(c.cpx);
  const double npy = std::norm(c.cpy);
  ConsistencyReport r;
  r.relations = {std::abs(nx + npx - 1.0),
                 std::abs(ny + npy - 1.0),
                 std::abs(std::conj(c.cx) * c.cy + std::conj(c.cpx) * c.cpy),
                 std::abs(nx + ny - 1.0),
                 std::abs(npx + npy - 1.0),
                 std::abs(nx - npy),
                 std::abs(ny - npx)};
  r.final_values = c.final_value_residuals;
  return r;
}

}  // namespace oscswap
