#pragma once

// Search for control-parameter values with b = 0 (perfect transfer).

#include <string>
#include <vector>

#include "oscswap/protocol.hpp"

namespace oscswap {

/// Everything that fixes a protocol except lambda.
struct ProtocolFamily {
  double w1 = 1.0;
  double w2 = 5.0;
  double tf = 5.0;
  double gamma = kHalfPi;

  ProtocolSpec at(double lambda) const { return build_spec(w1, w2, tf, lambda, gamma); }
};

struct TunerOptions {
  int scan_steps = 10000;
  int refine_steps = 40000;
  double candidate_threshold = 0.05;
  double b_tolerance = 1e-6;
  double width_tolerance = 1e-4;
};

double b_of_lambda(const ProtocolFamily& family, double lambda, int steps = 10000);

struct SweepPoint {
  double parameter;
  double value;
};

struct SweepGap {
  double parameter;
  std::string reason;
};

struct SweepCurve {
  std::vector<SweepPoint> points;  // strictly increasing parameter
  std::vector<SweepGap> gaps;      // parameters where evaluation failed
  std::vector<std::size_t> candidates;  // indices of near-zero local minima
};

/// b sampled at lo, lo + step, ..., hi. Design failures become gaps.
SweepCurve scan_b(const ProtocolFamily& family, double lo, double hi, double step,
                  const TunerOptions& options = {});

struct PerfectLambda {
  double lambda_star;
  double b_at_star;
  double lo;
  double hi;
};

/// Golden-section/parabolic (Brent) minimisation of b over [lo, hi].
/// Never throws for a poor minimum; the caller judges b_at_star.
PerfectLambda minimize_b(const ProtocolFamily& family, double lo, double hi,
                         const TunerOptions& options = {});

/// Every lambda in [lo, hi] with b < b_tolerance, ascending. Scans with
/// `scan_step`, then refines each candidate minimum.
std::vector<PerfectLambda> find_perfect_lambdas(const ProtocolFamily& family, double lo,
                                                double hi, double scan_step = 0.25,
                                                const TunerOptions& options = {});

/// Smallest perfect lambda in [lo, hi]. Throws NoPerfectTransfer carrying the
/// best minimum reached when none qualifies.
PerfectLambda find_perfect_lambda(const ProtocolFamily& family, double lo, double hi,
                                  double scan_step = 0.25, const TunerOptions& options = {});

/// lambda_min(tf) over tf in [tf_lo, tf_hi] with step `tf_step`; t_f values
/// without a zero in [window_lo, window_hi] are reported as gaps.
SweepCurve lambda_min_vs_tf(const ProtocolFamily& family, double tf_lo, double tf_hi,
                            double tf_step, double window_lo = 0.0, double window_hi = 100.0,
                            double scan_step = 0.25, const TunerOptions& options = {});

}  // namespace oscswap
