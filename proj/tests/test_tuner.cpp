#include <doctest.h>

#include <cmath>

#include "oscswap/error.hpp"
#include "oscswap/invariants.hpp"
#include "oscswap/tuner.hpp"

using namespace oscswap;

TEST_CASE("b of lambda matches the direct pipeline") {
  const ProtocolFamily f{1.0, 5.0, 1.0, kHalfPi};
  CHECK(b_of_lambda(f, 20.0) == doctest::Approx(transfer_b(build_spec(1.0, 5.0, 1.0, 20.0))));
}

TEST_CASE("smallest perfect lambda for tf = 5") {
  const PerfectLambda p = find_perfect_lambda(ProtocolFamily{1.0, 5.0, 5.0, kHalfPi}, 0.0, 40.0);
  CHECK(std::abs(p.lambda_star - 18.81) < 0.05);
  CHECK(p.b_at_star < 1e-6);
  CHECK(p.lo <= p.lambda_star);
  CHECK(p.hi >= p.lambda_star);
}

TEST_CASE("smallest perfect lambda for tf = 3") {
  const PerfectLambda p = find_perfect_lambda(ProtocolFamily{1.0, 5.0, 3.0, kHalfPi}, 0.0, 40.0);
  CHECK(std::abs(p.lambda_star - 21.89) < 0.05);
  CHECK(p.b_at_star < 1e-6);
}

TEST_CASE("a window without zeros reports the best value reached") {
  const ProtocolFamily f{1.0, 5.0, 5.0, kHalfPi};
  try {
    (void)find_perfect_lambda(f, 0.0, 1.0);
    FAIL("expected NoPerfectTransfer");
  } catch (const NoPerfectTransfer& e) {
    CHECK(e.lambda_best() >= 0.0);
    CHECK(e.lambda_best() <= 1.0);
    CHECK(e.b_best() > 1e-3);
    // The best value is no worse than the scan points.
    for (double l : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(e.b_best() <= b_of_lambda(f, l) + 1e-12);
  }
}

TEST_CASE("scan records design failures as gaps") {
  const ProtocolFamily f{1.0, 5.0, 5.0, kHalfPi};
  const SweepCurve c = scan_b(f, 60.0, 80.0, 2.0);
  CHECK_FALSE(c.points.empty());
  CHECK_FALSE(c.gaps.empty());
  for (const auto& p : c.points) CHECK(p.parameter < 70.0);
  for (const auto& g : c.gaps) CHECK(g.parameter > 69.0);
  for (std::size_t i = 1; i < c.points.size(); ++i)
    CHECK(c.points[i].parameter > c.points[i - 1].parameter);
}

TEST_CASE("all zeros in a window are ascending and each is perfect") {
  const auto zeros = find_perfect_lambdas(ProtocolFamily{1.0, 5.0, 5.0, kHalfPi}, 0.0, 40.0);
  REQUIRE_FALSE(zeros.empty());
  CHECK(std::abs(zeros.front().lambda_star - 18.81) < 0.05);
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    CHECK(zeros[i].b_at_star < 1e-6);
    if (i > 0) CHECK(zeros[i].lambda_star > zeros[i - 1].lambda_star);
  }
}

TEST_CASE("minimisation without a zero stops at the tangential minimum") {
  const ProtocolFamily f{1.0, 5.0, 5.0, std::numbers::pi / 4};
  const PerfectLambda p = minimize_b(f, 8.0, 10.0);
  CHECK(p.b_at_star < 1e-3);
  CHECK(p.b_at_star <= b_of_lambda(f, p.lambda_star - 0.01, 40000));
  CHECK(p.b_at_star <= b_of_lambda(f, p.lambda_star + 0.01, 40000));
}

TEST_CASE("input validation") {
  const ProtocolFamily f{1.0, 5.0, 5.0, kHalfPi};
  CHECK_THROWS_AS(scan_b(f, 5.0, 1.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(scan_b(f, 0.0, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(minimize_b(f, 1.0, 1.0), InvalidInput);
}

TEST_CASE("lambda_min as a function of tf") {
  const SweepCurve c = lambda_min_vs_tf(ProtocolFamily{1.0, 5.0, 5.0, kHalfPi}, 3.0, 5.0, 2.0);
  REQUIRE(c.points.size() == 2);
  CHECK(std::abs(c.points[0].value - 21.89) < 0.05);
  CHECK(std::abs(c.points[1].value - 18.81) < 0.05);
}
