#include "oscswap/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oscswap/error.hpp"

namespace oscswap {

namespace {

std::string at_time(double t) {
  if (std::isnan(t)) return {};
  std::ostringstream os;
  os << " at t=" << t;
  return os.str();
}

SymMat2 sym_inverse(const SymMat2& m, double t) {
  const double d = m.det();
  if (!(m.a11 > 0.0 && d > 0.0))
    throw DesignSingularity("R is not positive-definite" + at_time(t), t);
  return {m.a22 / d, -m.a12 / d, m.a11 / d};
}

SymMat2 sym_square(const SymMat2& m) {
  return {m.a11 * m.a11 + m.a12 * m.a12, m.a12 * (m.a11 + m.a22), m.a12 * m.a12 + m.a22 * m.a22};
}

CMat2 cmat2_unitary_rhs(const CMat2& u, const CMat2& a) { return u * a; }

}  // namespace

ProtocolSpec build_spec(double w1, double w2, double tf, double lambda, double gamma) {
  if (!(w1 > 0.0) || !(w2 > 0.0)) throw InvalidInput("frequencies must be positive");
  if (!(tf > 0.0)) throw InvalidInput("process duration must be positive");
  if (!std::isfinite(lambda)) throw InvalidInput("lambda must be finite");
  if (!(gamma > 0.0 && gamma <= std::numbers::pi + 1e-15))
    throw InvalidInput("rotation angle must lie in (0, pi]");

  ProtocolSpec s;
  s.w1 = w1;
  s.w2 = w2;
  s.tf = tf;
  s.lambda = lambda;
  s.gamma = gamma;
  s.R0 = {1.0 / std::sqrt(w1), 0.0, 1.0 / std::sqrt(w2)};
  s.Rf = spd_power(s.final_potential(), -0.25);
  s.Rc = {0.0, lambda * std::pow(w1 * w2, -0.25), 0.0};
  return s;
}

RValue eval_R(const ProtocolSpec& spec, double t) {
  const double slack = 1e-12 * spec.tf;
  if (!(t >= -slack && t <= spec.tf + slack))
    throw RangeError("time outside [0, tf]" + at_time(t));
  const double tf = spec.tf;
  const double x = std::clamp(t / tf, 0.0, 1.0);
  const double y = 1.0 - x;
  const double x2 = x * x;
  const double x3 = x2 * x;

  const double p = x3 * (10.0 - 15.0 * x + 6.0 * x2);
  const double dp = 30.0 * x2 * y * y / tf;
  const double ddp = 60.0 * x * y * (1.0 - 2.0 * x) / (tf * tf);

  const double y2 = y * y;
  const double s = x3 * y2 * y;
  const double ds = 3.0 * x2 * y2 * (y - x) / tf;
  const double dds = 6.0 * x * y * (y2 - 3.0 * x * y + x2) / (tf * tf);

  const SymMat2 span = spec.Rf - spec.R0;
  RValue r;
  r.R = (1.0 - p) * spec.R0 + p * spec.Rf + s * spec.Rc;
  r.dR = dp * span + ds * spec.Rc;
  r.ddR = ddp * span + dds * spec.Rc;
  return r;
}

RMat2 solve_coupling_J(const SymMat2& R, const SymMat2& dR, double t) {
  const SymMat2 Rinv = sym_inverse(R, t);
  const SymMat2 Rinv2 = sym_square(Rinv);
  const RMat2 r = R.full();
  const RMat2 ri = Rinv.full();
  const RMat2 ri2 = Rinv2.full();
  const RMat2 dr = dR.full();
  const RMat2 rhs = commutator(dr, ri) + sandwiched_commutator(r, ri2, dr);
  const auto J = solve_anticommutator(Rinv2, rhs);
  if (!J) throw DesignSingularity("singular coupling equation" + at_time(t), t);
  return *J;
}

CMat2 compute_A(const SymMat2& R, const SymMat2& dR, const RMat2& J, double t) {
  const SymMat2 Rinv = sym_inverse(R, t);
  const RMat2 ri = Rinv.full();
  const RMat2 re = 0.5 * commutator(ri, dR.full()) + 0.5 * (ri * J * ri);
  const RMat2 im = sym_square(Rinv).full();
  return {cplx(re.m00, im.m00), cplx(re.m01, im.m01), cplx(re.m10, im.m10),
          cplx(re.m11, im.m11)};
}

CMat2 solve_M_raw(const SymMat2& R, const SymMat2& dR, const SymMat2& ddR, const CMat2& A,
                  double t) {
  if (!R.positive_definite())
    throw DesignSingularity("R is not positive-definite" + at_time(t), t);
  const CMat2 r = R.cfull();
  const CMat2 dr = dR.cfull();
  const CMat2 ddr = ddR.cfull();
  const CMat2 rhs =
      2.0 * sandwiched_commutator(dr, r, A) - 2.0 * (r * A * A * r) - anticommutator(ddr, r);
  const auto M = solve_anticommutator(sym_square(R), rhs);
  if (!M) throw DesignSingularity("singular potential equation" + at_time(t), t);
  return *M;
}

SymMat2 compute_M(const SymMat2& R, const SymMat2& dR, const SymMat2& ddR, const CMat2& A,
                  double t, double reality_tol) {
  const CMat2 m = solve_M_raw(R, dR, ddR, A, t);
  const RMat2 re = real_part(m);
  const double scale = std::max(1.0, max_abs(re));
  const double residual =
      std::max(max_abs(imag_part(m)), std::abs(re.m01 - re.m10)) / scale;
  if (!(residual <= reality_tol)) {
    std::ostringstream os;
    os << "potential matrix is not real-symmetric (residual " << residual << ")" << at_time(t);
    throw DesignViolation(os.str(), t, residual);
  }
  return {re.m00, 0.5 * (re.m01 + re.m10), re.m11};
}

DesignPoint design_at(const ProtocolSpec& spec, double t) {
  DesignPoint d;
  d.r = eval_R(spec, t);
  d.J = solve_coupling_J(d.r.R, d.r.dR, t);
  d.A = compute_A(d.r.R, d.r.dR, d.J, t);
  d.M = compute_M(d.r.R, d.r.dR, d.r.ddR, d.A, t);
  return d;
}

SymMat2 potential_at(const ProtocolSpec& spec, double t) { return design_at(spec, t).M; }

FrameDecomposition decompose_potential(const SymMat2& M, double theta_prev) {
  const SymEigen2 e = eigen(M);
  const double mean = 0.5 * (e.upper + e.lower);
  if (e.upper - e.lower <= 1e-12 * std::max(1.0, std::abs(mean)))
    return {theta_prev, e.upper, e.lower};
  const double quarter_turns = std::round((theta_prev - e.angle) / kHalfPi);
  const long parity = static_cast<long>(quarter_turns) % 2;
  FrameDecomposition f;
  f.theta = e.angle + quarter_turns * kHalfPi;
  if (parity == 0) {
    f.omega1_sq = e.upper;
    f.omega2_sq = e.lower;
  } else {
    f.omega1_sq = e.lower;
    f.omega2_sq = e.upper;
  }
  return f;
}

std::optional<double> ProtocolSample::level_energy(int n, int k) const {
  if (repeller()) return std::nullopt;
  return std::sqrt(frame.omega1_sq) * (n + 0.5) + std::sqrt(frame.omega2_sq) * (k + 0.5);
}

namespace {

// Follows the continuous branch from (t0, theta0) to t1, bisecting the
// interval whenever the angle moves too far for nearest-branch selection to
// be trustworthy.
FrameDecomposition chain_frame(const ProtocolSpec& spec, double t0, double theta0, double t1,
                               const SymMat2& m1, int depth) {
  constexpr double kMaxStep = 0.05;
  FrameDecomposition f = decompose_potential(m1, theta0);
  if (std::abs(f.theta - theta0) <= kMaxStep || depth >= 40) return f;
  const double tm = 0.5 * (t0 + t1);
  const FrameDecomposition mid = chain_frame(spec, t0, theta0, tm, potential_at(spec, tm), depth + 1);
  return chain_frame(spec, tm, mid.theta, t1, m1, depth + 1);
}

}  // namespace

ProtocolTable tabulate_protocol(const ProtocolSpec& spec, int n_samples) {
  if (n_samples < 2) throw InvalidInput("need at least two samples");
  std::vector<double> times(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i)
    times[static_cast<std::size_t>(i)] =
        spec.tf * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  return tabulate_protocol_at(spec, times);
}

ProtocolTable tabulate_protocol_at(const ProtocolSpec& spec, std::span<const double> times) {
  ProtocolTable table;
  table.spec = spec;
  table.samples.reserve(times.size());
  double theta = 0.0;
  double t_prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] >= times[i - 1])) throw InvalidInput("sample times must ascend");
    ProtocolSample s;
    s.t = times[i];
    s.M = potential_at(spec, s.t);
    s.frame = s.t == 0.0 ? decompose_potential(s.M, 0.0)
                         : chain_frame(spec, t_prev, theta, s.t, s.M, 0);
    theta = s.frame.theta;
    t_prev = s.t;
    table.samples.push_back(s);
  }
  return table;
}

std::vector<CMat2> integrate_unitary(const ProtocolSpec& spec, std::span<const double> t_grid) {
  std::vector<CMat2> out;
  out.reserve(t_grid.size());
  if (t_grid.empty()) return out;
  auto a_at = [&](double t) {
    const RValue r = eval_R(spec, t);
    return compute_A(r.R, r.dR, solve_coupling_J(r.R, r.dR, t), t);
  };
  CMat2 u = CMat2::identity();
  out.push_back(u);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double t0 = t_grid[i - 1];
    const double h = t_grid[i] - t0;
    const CMat2 a0 = a_at(t0);
    const CMat2 ah = a_at(t0 + 0.5 * h);
    const CMat2 a1 = a_at(t_grid[i]);
    const CMat2 k1 = cmat2_unitary_rhs(u, a0);
    const CMat2 k2 = cmat2_unitary_rhs(u + (0.5 * h) * k1, ah);
    const CMat2 k3 = cmat2_unitary_rhs(u + (0.5 * h) * k2, ah);
    const CMat2 k4 = cmat2_unitary_rhs(u + h * k3, a1);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(u);
  }
  return out;
}

Mat4 assemble_invariant_matrix(const SymMat2& R, const SymMat2& dR, const CMat2& A,
                               const CMat2& U) {
  const CMat2 r = R.cfull();
  const CMat2 p = U * r;
  const CMat2 dp = U * (A * r + dR.cfull());
  const RMat2 tl = real_part(adjoint(dp) * dp);
  const RMat2 tr = real_part(-(adjoint(dp) * p));
  const RMat2 bl = real_part(-(adjoint(p) * dp));
  const RMat2 br = real_part(adjoint(p) * p);
  Mat4 g;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      g(i, j) = tl(i, j);
      g(i, j + 2) = tr(i, j);
      g(i + 2, j) = bl(i, j);
      g(i + 2, j + 2) = br(i, j);
    }
  }
  // Exact symmetrisation: the blocks are Hermitian up to round-off.
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) g(i, j) = g(j, i) = 0.5 * (g(i, j) + g(j, i));
  return g;
}

Mat4 invariance_rhs(const SymMat2& M, const Mat4& gamma) {
  Mat4 omega;
  const RMat2 m = M.full();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) omega(i, j) = m(i, j);
  omega(2, 2) = omega(3, 3) = 1.0;
  Mat4 s;
  s(0, 2) = s(1, 3) = 1.0;
  s(2, 0) = s(3, 1) = -1.0;
  auto mul = [](const Mat4& a, const Mat4& b) {
    Mat4 c;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  };
  const Mat4 lhs = mul(mul(omega, s), gamma);
  const Mat4 rhs = mul(mul(gamma, s), omega);
  Mat4 out;
  for (int i = 0; i < 16; ++i) out.v[i] = lhs.v[i] - rhs.v[i];
  return out;
}

PotentialSchedule::PotentialSchedule(double duration, Fn fn)
    : duration_(duration), fn_(std::move(fn)) {
  if (!(duration_ > 0.0)) throw InvalidInput("schedule duration must be positive");
}

PotentialSchedule PotentialSchedule::designed(const ProtocolSpec& spec) {
  return PotentialSchedule(spec.tf, [spec](double t) { return potential_at(spec, t); });
}

PotentialSchedule PotentialSchedule::constant(const SymMat2& m, double duration) {
  return PotentialSchedule(duration, [m](double) { return m; });
}

std::vector<SymMat2> PotentialSchedule::half_step_nodes(int steps) const {
  if (steps < 1) throw InvalidInput("need at least one step");
  const int n = 2 * steps;
  std::vector<SymMat2> nodes(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    nodes[static_cast<std::size_t>(k)] =
        fn_(k == n ? duration_ : duration_ * static_cast<double>(k) / static_cast<double>(n));
  return nodes;
}

}  // namespace oscswap
