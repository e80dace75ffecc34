#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oscswap/invariants.hpp"
#include "oscswap/kernels.hpp"

using namespace oscswap;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(g(rng), g(rng));
  return v;
}

std::vector<double> random_real(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("active kernel set is one of the known variants") {
  const std::string name = simd::active_kernels().name;
  CHECK((name == "scalar" || name == "avx2"));
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (fast == nullptr) {
    MESSAGE("AVX2 kernels unavailable on this machine; equivalence not exercised");
    return;
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(42);
  for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 255u, 256u, 1023u}) {
    const auto a = random_complex(n, rng);
    const auto b = random_complex(n, rng);
    const auto psi = random_complex(n, rng);
    const auto w = random_real(n, rng);
    const cplx s(0.3, -1.2);

    auto p1 = psi, p2 = psi;
    ref.scale_row(p1.data(), s, a.data(), b.data(), n);
    fast->scale_row(p2.data(), s, a.data(), b.data(), n);
    CHECK(max_diff(p1, p2) < 1e-13);

    p1 = psi;
    p2 = psi;
    ref.scale_row(p1.data(), s, a.data(), nullptr, n);
    fast->scale_row(p2.data(), s, a.data(), nullptr, n);
    CHECK(max_diff(p1, p2) < 1e-13);

    const double r1 = ref.sum_abs2(psi.data(), n);
    CHECK(fast->sum_abs2(psi.data(), n) == doctest::Approx(r1).epsilon(1e-13));
    const double r2 = ref.weighted_abs2(psi.data(), w.data(), n);
    CHECK(std::abs(fast->weighted_abs2(psi.data(), w.data(), n) - r2) < 1e-12 * (1.0 + r1));

    auto x1 = random_real(n, rng), y1 = random_real(n, rng), px1 = random_real(n, rng),
         py1 = random_real(n, rng);
    auto x2 = x1, y2 = y1, px2 = px1, py2 = py1;
    const SymMat2 m0{1.0, 0.3, 25.0}, mh{2.0, -0.7, 20.0}, m1{-1.5, 1.2, 18.0};
    for (int step = 0; step < 100; ++step) {
      ref.rk4_batch(x1.data(), y1.data(), px1.data(), py1.data(), n, m0, mh, m1, 0.01);
      fast->rk4_batch(x2.data(), y2.data(), px2.data(), py2.data(), n, m0, mh, m1, 0.01);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = 1.0 + std::abs(x1[i]) + std::abs(px1[i]);
      CHECK(std::abs(x1[i] - x2[i]) < 1e-12 * scale);
      CHECK(std::abs(y1[i] - y2[i]) < 1e-12 * scale);
      CHECK(std::abs(px1[i] - px2[i]) < 1e-12 * scale);
      CHECK(std::abs(py1[i] - py2[i]) < 1e-12 * scale);
    }
  }
}

TEST_CASE("complex trajectories split exactly into real and imaginary runs") {
  const ProtocolSpec spec = build_spec(1.0, 5.0, 1.0, 20.0);
  const int steps = 2000;
  const PotentialSchedule drive = PotentialSchedule::designed(spec);
  const auto nodes = drive.half_step_nodes(steps);
  const TrajectoryState start{cplx(0.3, -0.2), cplx(-0.1, 0.7), cplx(1.1, 0.4), cplx(0.0, -0.9)};
  const TrajectoryState end = propagate_trajectory(drive, start, steps);

  std::vector<double> x{start.ux.real(), start.ux.imag()};
  std::vector<double> y{start.uy.real(), start.uy.imag()};
  std::vector<double> px{start.vx.real(), start.vx.imag()};
  std::vector<double> py{start.vy.real(), start.vy.imag()};
  const double h = spec.tf / steps;
  const auto& scalar = simd::scalar_kernels();
  for (int s = 0; s < steps; ++s) {
    const auto k = static_cast<std::size_t>(2 * s);
    scalar.rk4_batch(x.data(), y.data(), px.data(), py.data(), 2, nodes[k], nodes[k + 1],
                     nodes[k + 2], h);
  }
  CHECK(end.ux.real() == x[0]);
  CHECK(end.ux.imag() == x[1]);
  CHECK(end.uy.real() == y[0]);
  CHECK(end.uy.imag() == y[1]);
  CHECK(end.vx.real() == px[0]);
  CHECK(end.vx.imag() == px[1]);
  CHECK(end.vy.real() == py[0]);
  CHECK(end.vy.imag() == py[1]);
}
