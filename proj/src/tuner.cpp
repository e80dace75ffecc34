#include "oscswap/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "oscswap/error.hpp"
#include "oscswap/invariants.hpp"
#include "oscswap/parallel.hpp"

namespace oscswap {

double b_of_lambda(const ProtocolFamily& family, double lambda, int steps) {
  try {
    return transfer_b(family.at(lambda), steps);
  } catch (const DesignSingularity& e) {
    std::ostringstream os;
    os << e.what() << " (lambda=" << lambda << ")";
    throw DesignSingularity(os.str(), e.time());
  } catch (const DesignViolation& e) {
    std::ostringstream os;
    os << e.what() << " (lambda=" << lambda << ")";
    throw DesignViolation(os.str(), e.time(), e.residual());
  }
}

namespace {

std::vector<double> uniform_grid(double lo, double hi, double step) {
  std::vector<double> g;
  if (!(hi >= lo)) return g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  g.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
  return g;
}

}  // namespace

SweepCurve scan_b(const ProtocolFamily& family, double lo, double hi, double step,
                  const TunerOptions& options) {
  if (!(step > 0.0)) throw InvalidInput("scan step must be positive");
  if (!(hi >= lo)) throw InvalidInput("empty lambda range");
  const std::vector<double> grid = uniform_grid(lo, hi, step);
  std::vector<std::optional<double>> values(grid.size());
  std::vector<std::string> reasons(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      values[i] = b_of_lambda(family, grid[i], options.scan_steps);
    } catch (const Error& e) {
      reasons[i] = e.what();
    }
  });

  SweepCurve curve;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i])
      curve.points.push_back({grid[i], *values[i]});
    else
      curve.gaps.push_back({grid[i], reasons[i]});
  }
  // Local minima on the sampled points; a gap neighbour counts as "higher".
  const auto& p = curve.points;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].value >= options.candidate_threshold) continue;
    const bool left_ok = i == 0 || p[i - 1].value >= p[i].value;
    const bool right_ok = i + 1 == p.size() || p[i + 1].value > p[i].value;
    if (left_ok && right_ok) curve.candidates.push_back(i);
  }
  return curve;
}

PerfectLambda minimize_b(const ProtocolFamily& family, double lo, double hi,
                         const TunerOptions& options) {
  if (!(hi > lo)) throw InvalidInput("minimisation bracket must have hi > lo");
  constexpr double kGolden = 0.3819660112501051;
  auto f = [&](double lambda) {
    try {
      return b_of_lambda(family, lambda, options.refine_steps);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  double a = lo;
  double b = hi;
  double x = a + kGolden * (b - a);
  double w = x;
  double v = x;
  double fx = f(x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol = 1e-3 * options.width_tolerance + 1e-12 * std::abs(x);
    if (b - a < options.width_tolerance && fx < options.b_tolerance) break;
    if (b - a < 2.0 * tol) break;
    bool golden = true;
    if (std::abs(e) > tol) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      if (std::abs(p) < std::abs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x)) {
        e = d;
        d = p / q;
        const double u = x + d;
        if (u - a < 2.0 * tol || b - u < 2.0 * tol) d = x < m ? tol : -tol;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= m ? a : b) - x;
      d = kGolden * e;
    }
    const double u = std::abs(d) >= tol ? x + d : x + (d > 0.0 ? tol : -tol);
    const double fu = f(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  // The interior search never samples the bracket ends; a monotone b has its
  // minimum there.
  for (double end : {lo, hi}) {
    const double fe = f(end);
    if (fe < fx) {
      x = end;
      fx = fe;
    }
  }
  return {x, fx, lo, hi};
}

std::vector<PerfectLambda> find_perfect_lambdas(const ProtocolFamily& family, double lo,
                                                double hi, double scan_step,
                                                const TunerOptions& options) {
  const double step = std::min(scan_step, (hi - lo) / 8.0);
  const SweepCurve scan = scan_b(family, lo, hi, step, options);
  std::vector<PerfectLambda> found;
  for (std::size_t idx : scan.candidates) {
    const double c = scan.points[idx].parameter;
    const PerfectLambda r =
        minimize_b(family, std::max(lo, c - step), std::min(hi, c + step), options);
    if (r.b_at_star < options.b_tolerance) {
      if (found.empty() || std::abs(found.back().lambda_star - r.lambda_star) > 10.0 * options.width_tolerance)
        found.push_back(r);
    }
  }
  return found;
}

PerfectLambda find_perfect_lambda(const ProtocolFamily& family, double lo, double hi,
                                  double scan_step, const TunerOptions& options) {
  if (!(hi > lo)) throw InvalidInput("lambda bracket must have hi > lo");
  const double step = std::min(scan_step, (hi - lo) / 8.0);
  const SweepCurve scan = scan_b(family, lo, hi, step, options);
  PerfectLambda best{std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::infinity(), lo, hi};
  for (const auto& pt : scan.points)
    if (pt.value < best.b_at_star) best = {pt.parameter, pt.value, lo, hi};
  for (std::size_t idx : scan.candidates) {
    const double c = scan.points[idx].parameter;
    const PerfectLambda r =
        minimize_b(family, std::max(lo, c - step), std::min(hi, c + step), options);
    if (r.b_at_star < options.b_tolerance) return {r.lambda_star, r.b_at_star, lo, hi};
    if (r.b_at_star < best.b_at_star) best = r;
  }
  std::ostringstream os;
  os << "no perfect-transfer lambda in [" << lo << ", " << hi << "]; best b=" << best.b_at_star
     << " at lambda=" << best.lambda_star;
  throw NoPerfectTransfer(os.str(), best.lambda_star, best.b_at_star);
}

SweepCurve lambda_min_vs_tf(const ProtocolFamily& family, double tf_lo, double tf_hi,
                            double tf_step, double window_lo, double window_hi,
                            double scan_step, const TunerOptions& options) {
  SweepCurve curve;
  if (!(tf_hi >= tf_lo) || !(tf_lo > 0.0)) return curve;
  if (!(tf_step > 0.0)) throw InvalidInput("tf step must be positive");
  for (double tf : uniform_grid(tf_lo, tf_hi, tf_step)) {
    ProtocolFamily f = family;
    f.tf = tf;
    try {
      const PerfectLambda r = find_perfect_lambda(f, window_lo, window_hi, scan_step, options);
      curve.points.push_back({tf, r.lambda_star});
    } catch (const NoPerfectTransfer& e) {
      curve.gaps.push_back({tf, e.what()});
    }
  }
  return curve;
}

}  // namespace oscswap
