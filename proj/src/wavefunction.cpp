#include "oscswap/wavefunction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft2.hpp"
#include "oscswap/error.hpp"
#include "oscswap/kernels.hpp"
#include "oscswap/oscillator.hpp"

namespace oscswap {

namespace {

double wavenumber(int i, int n, double half_width) {
  const int shifted = i < n / 2 ? i : i - n;
  return std::numbers::pi * shifted / half_width;
}

std::vector<cplx> phases(std::span<const double> values, double factor) {
  std::vector<cplx> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::polar(1.0, factor * values[i]);
  return out;
}

// exp(i * rate * y_j) for y_j = y0 + j dy; exact every 32 entries, recurrence between.
void linear_phase(double rate, double y0, double dy, std::span<cplx> out) {
  const double sr = std::cos(rate * dy);
  const double si = std::sin(rate * dy);
  for (std::size_t j0 = 0; j0 < out.size(); j0 += 32) {
    const cplx seed = std::polar(1.0, rate * (y0 + dy * static_cast<double>(j0)));
    double re = seed.real();
    double im = seed.imag();
    const std::size_t end = std::min(out.size(), j0 + 32);
    for (std::size_t j = j0; j < end; ++j) {
      out[j] = cplx(re, im);
      const double t = re * sr - im * si;
      im = re * si + im * sr;
      re = t;
    }
  }
}

}  // namespace

SpatialGrid SpatialGrid::make(int nx, int ny, double Lx, double Ly) {
  auto ok = [](int n) { return n >= 64 && std::has_single_bit(static_cast<unsigned>(n)); };
  if (!ok(nx) || !ok(ny)) throw InvalidInput("grid sizes must be powers of two >= 64");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw InvalidInput("grid half-widths must be positive");
  return {nx, ny, Lx, Ly};
}

double SpatialGrid::kx(int i) const { return wavenumber(i, nx, Lx); }
double SpatialGrid::ky(int j) const { return wavenumber(j, ny, Ly); }

std::vector<double> SpatialGrid::xs() const {
  std::vector<double> v(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) v[static_cast<std::size_t>(i)] = x(i);
  return v;
}

std::vector<double> SpatialGrid::ys() const {
  std::vector<double> v(static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) v[static_cast<std::size_t>(j)] = y(j);
  return v;
}

SpatialGrid auto_grid(const ProtocolSpec& spec, int n_points, double widths) {
  double min_sq = std::numeric_limits<double>::infinity();
  constexpr int kProbe = 400;
  for (int i = 0; i <= kProbe; ++i) {
    const SymEigen2 e = eigen(potential_at(spec, spec.tf * i / kProbe));
    min_sq = std::min({min_sq, std::abs(e.upper), std::abs(e.lower)});
  }
  const double width = std::pow(std::max(min_sq, 0.1), -0.25);
  const double half = widths * width;
  return SpatialGrid::make(n_points, n_points, half, half);
}

WavefunctionGrid::WavefunctionGrid(const SpatialGrid& grid) : grid_(grid), data_(grid.size()) {}

double WavefunctionGrid::norm() const {
  return simd::active_kernels().sum_abs2(data_.data(), data_.size()) * grid_.dx() * grid_.dy();
}

double WavefunctionGrid::boundary_max() const {
  double m = 0.0;
  for (int j = 0; j < grid_.ny; ++j)
    m = std::max({m, std::abs((*this)(0, j)), std::abs((*this)(grid_.nx - 1, j))});
  for (int i = 0; i < grid_.nx; ++i)
    m = std::max({m, std::abs((*this)(i, 0)), std::abs((*this)(i, grid_.ny - 1))});
  return m;
}

cplx inner_product(const WavefunctionGrid& a, const WavefunctionGrid& b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.data_.size(); ++i) acc += std::conj(a.data_[i]) * b.data_[i];
  return acc * a.grid_.dx() * a.grid_.dy();
}

WavefunctionGrid& WavefunctionGrid::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

WavefunctionGrid& WavefunctionGrid::operator+=(const WavefunctionGrid& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

WavefunctionGrid initial_state(const FockLabel& label, double w1, double w2,
                               const SpatialGrid& grid) {
  const auto fx = ho_eigenfunction(label.n, w1, grid.xs());
  const auto fy = ho_eigenfunction(label.k, w2, grid.ys());
  WavefunctionGrid psi(grid);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      psi(i, j) = fx[static_cast<std::size_t>(i)] * fy[static_cast<std::size_t>(j)];
  const double n = psi.norm();
  psi *= 1.0 / std::sqrt(n);
  return psi;
}

namespace {

class Propagator {
 public:
  Propagator(const WavefunctionGrid& psi0, double dt)
      : psi_(psi0),
        g_(psi0.grid()),
        k_(simd::active_kernels()),
        fft_(g_.nx, g_.ny, psi_.row(0)),
        xs_(g_.xs()),
        ys_(g_.ys()),
        ys2_(ys_.size()),
        cross_(ys_.size()),
        col_(ys_.size()) {
    for (std::size_t j = 0; j < ys_.size(); ++j) ys2_[j] = ys_[j] * ys_[j];
    std::vector<double> kx2(static_cast<std::size_t>(g_.nx)), ky2(static_cast<std::size_t>(g_.ny));
    for (int i = 0; i < g_.nx; ++i) kx2[static_cast<std::size_t>(i)] = g_.kx(i) * g_.kx(i);
    for (int j = 0; j < g_.ny; ++j) ky2[static_cast<std::size_t>(j)] = g_.ky(j) * g_.ky(j);
    kin_x_ = phases(kx2, -0.5 * dt);
    kin_y_ = phases(ky2, -0.5 * dt);
    const double inv = 1.0 / static_cast<double>(g_.size());
    for (auto& v : kin_x_) v *= inv;
  }

  // psi *= exp(-i tau X^T M X / 2)
  void kick(const SymMat2& m, double tau) {
    for (int j = 0; j < g_.ny; ++j)
      col_[static_cast<std::size_t>(j)] = std::polar(1.0, -0.5 * tau * m.a22 * ys2_[static_cast<std::size_t>(j)]);
    for (int i = 0; i < g_.nx; ++i) {
      const double x = xs_[static_cast<std::size_t>(i)];
      linear_phase(-tau * m.a12 * x, ys_.front(), g_.dy(), cross_);
      k_.scale_row(psi_.row(i), std::polar(1.0, -0.5 * tau * m.a11 * x * x), col_.data(),
                   cross_.data(), col_.size());
    }
  }

  void drift() {
    fft_.forward();
    for (int i = 0; i < g_.nx; ++i)
      k_.scale_row(psi_.row(i), kin_x_[static_cast<std::size_t>(i)], kin_y_.data(), nullptr,
                   kin_y_.size());
    fft_.backward();
  }

  WavefunctionGrid& state() { return psi_; }

 private:
  WavefunctionGrid psi_;
  SpatialGrid g_;
  const simd::KernelTable& k_;
  detail::Fft2 fft_;
  std::vector<double> xs_, ys_, ys2_;
  std::vector<cplx> cross_, col_;
  std::vector<cplx> kin_x_, kin_y_;
};

void check_quality(const WavefunctionGrid& psi, double norm0, double t,
                   const SplitOperatorOptions& o) {
  const double drift = std::abs(psi.norm() - norm0);
  const double edge = psi.boundary_max();
  if (!(drift <= o.norm_tolerance) || !(edge <= o.boundary_tolerance)) {
    std::ostringstream os;
    os << "split-operator quality failure at t=" << t << ": norm drift " << drift
       << ", boundary amplitude " << edge;
    throw PropagationQuality(os.str());
  }
}

}  // namespace

WavefunctionGrid split_operator_evolve(const WavefunctionGrid& psi0, const PotentialSchedule& drive,
                                       const SplitOperatorOptions& options) {
  if (options.n_steps < 1) throw InvalidInput("need at least one time step");
  const int n = options.n_steps;
  const double dt = drive.duration() / n;
  const double norm0 = psi0.norm();
  Propagator prop(psi0, dt);
  if (options.observer && options.record_every > 0) options.observer(0.0, prop.state());

  SymMat2 pending{};
  bool has_pending = false;
  for (int s = 0; s < n; ++s) {
    const SymMat2 mid = drive((s + 0.5) * dt);
    if (has_pending)
      prop.kick(0.5 * (pending + mid), dt);
    else
      prop.kick(mid, 0.5 * dt);
    prop.drift();
    const bool last = s + 1 == n;
    const bool observe = options.record_every > 0 && (s + 1) % options.record_every == 0;
    if (last || observe) {
      prop.kick(mid, 0.5 * dt);
      has_pending = false;
      const double t = last ? drive.duration() : (s + 1) * dt;
      if (options.observer && (observe || (last && options.record_every > 0)))
        options.observer(t, prop.state());
      check_quality(prop.state(), norm0, t, options);
    } else {
      pending = mid;
      has_pending = true;
    }
  }
  return prop.state();
}

WavefunctionGrid split_operator_evolve(const WavefunctionGrid& psi0, const ProtocolSpec& spec,
                                       int n_steps) {
  SplitOperatorOptions o;
  o.n_steps = n_steps;
  return split_operator_evolve(psi0, PotentialSchedule::designed(spec), o);
}

double energy_expectation(const WavefunctionGrid& psi, const SymMat2& M) {
  const SpatialGrid& g = psi.grid();
  const auto& k = simd::active_kernels();
  const std::vector<double> xs = g.xs();
  const std::vector<double> ys = g.ys();
  std::vector<double> y1(ys), y2(ys.size()), ky2(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    y2[j] = ys[j] * ys[j];
    ky2[j] = g.ky(static_cast<int>(j)) * g.ky(static_cast<int>(j));
  }

  double total = 0.0;
  double potential = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    const cplx* row = psi.row(i);
    const double s0 = k.sum_abs2(row, ys.size());
    const double s1 = k.weighted_abs2(row, y1.data(), ys.size());
    const double s2 = k.weighted_abs2(row, y2.data(), ys.size());
    total += s0;
    potential += 0.5 * M.a11 * x * x * s0 + M.a12 * x * s1 + 0.5 * M.a22 * s2;
  }

  WavefunctionGrid spectrum(psi);
  detail::Fft2 fft(g.nx, g.ny, spectrum.row(0));
  fft.forward();
  double ktotal = 0.0;
  double kinetic = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const cplx* row = spectrum.row(i);
    const double s0 = k.sum_abs2(row, ky2.size());
    const double kx = g.kx(i);
    ktotal += s0;
    kinetic += 0.5 * (kx * kx * s0 + k.weighted_abs2(row, ky2.data(), ky2.size()));
  }
  return potential / total + kinetic / ktotal;
}

FinalAnalysis analyze_final(const WavefunctionGrid& psi, const SymMat2& final_M,
                            double frame_angle, double wx, double wy, int cutoff) {
  if (cutoff < 0) throw InvalidInput("cutoff must be non-negative");
  const SpatialGrid& g = psi.grid();
  // Resolution check for the highest level on each axis.
  (void)ho_eigenfunction(cutoff, wx, g.xs());
  (void)ho_eigenfunction(cutoff, wy, g.ys());

  const RMat2 w = rotation(frame_angle);
  const auto levels = static_cast<std::size_t>(cutoff) + 1;
  std::vector<double> fx(levels), fy(levels);
  std::vector<cplx> acc(levels * levels, cplx(0.0));
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.ny; ++j) {
      const double y = g.y(j);
      const cplx v = psi(i, j);
      if (v == cplx(0.0)) continue;
      ho_eigenfunctions_at(cutoff, wx, w.m00 * x + w.m01 * y, fx);
      ho_eigenfunctions_at(cutoff, wy, w.m10 * x + w.m11 * y, fy);
      for (std::size_t m = 0; m < levels; ++m) {
        const cplx vm = v * fx[m];
        for (std::size_t l = 0; m + l < levels; ++l) acc[m * levels + l] += vm * fy[l];
      }
    }
  }
  FinalAnalysis out;
  const double area = g.dx() * g.dy();
  double captured = 0.0;
  for (std::size_t m = 0; m < levels; ++m) {
    for (std::size_t l = 0; m + l < levels; ++l) {
      const FockLabel label{static_cast<int>(m), static_cast<int>(l)};
      const cplx amp = acc[m * levels + l] * area;
      out.amplitudes[label] = amp;
      out.populations[label] = std::norm(amp);
      captured += std::norm(amp);
    }
  }
  out.norm = psi.norm();
  out.leakage = out.norm - captured;
  out.leakage_warning = out.leakage > 1e-3;
  out.energy = energy_expectation(psi, final_M);
  return out;
}

FinalAnalysis analyze_final(const WavefunctionGrid& psi, const ProtocolSpec& spec, int cutoff) {
  const auto [wx, wy] = spec.final_mode_frequencies();
  return analyze_final(psi, spec.final_potential(), spec.final_frame_angle(), wx, wy, cutoff);
}

}  // namespace oscswap
