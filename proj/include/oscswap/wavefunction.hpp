#pragma once

// Grid wavefunctions and split-operator propagation of the 2D Schrodinger
// equation with H = p^2/2 + X^T M(t) X / 2.

#include <cstddef>
#include <functional>
#include <map>
#include <new>
#include <span>
#include <vector>

#include "oscswap/invariants.hpp"
#include "oscswap/protocol.hpp"

namespace oscswap {

template <class T, std::size_t Align = 64>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) {}
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(Align)));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t(Align)); }
  friend bool operator==(const AlignedAllocator&, const AlignedAllocator&) { return true; }
};

/// Uniform periodic mesh on [-Lx, Lx) x [-Ly, Ly).
struct SpatialGrid {
  int nx = 256;
  int ny = 256;
  double Lx = 8.0;
  double Ly = 8.0;

  /// Validates nx, ny (powers of two, >= 64) and positive half-widths.
  static SpatialGrid make(int nx, int ny, double Lx, double Ly);

  double dx() const { return 2.0 * Lx / nx; }
  double dy() const { return 2.0 * Ly / ny; }
  double x(int i) const { return -Lx + i * dx(); }
  double y(int j) const { return -Ly + j * dy(); }
  double kx(int i) const;
  double ky(int j) const;
  std::vector<double> xs() const;
  std::vector<double> ys() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Square grid with half-width `widths` times the widest ground-state width
/// met during the protocol; |w^2| is floored at 0.1 through repeller windows.
SpatialGrid auto_grid(const ProtocolSpec& spec, int n_points = 256, double widths = 8.0);

class WavefunctionGrid {
 public:
  using Storage = std::vector<cplx, AlignedAllocator<cplx>>;

  explicit WavefunctionGrid(const SpatialGrid& grid);

  const SpatialGrid& grid() const { return grid_; }
  cplx& operator()(int i, int j) { return data_[index(i, j)]; }
  const cplx& operator()(int i, int j) const { return data_[index(i, j)]; }
  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  cplx* row(int i) { return data_.data() + index(i, 0); }
  const cplx* row(int i) const { return data_.data() + index(i, 0); }

  /// sum |psi|^2 dx dy
  double norm() const;
  /// Largest |psi| on the outermost rows and columns.
  double boundary_max() const;
  /// <a|b> dx dy
  friend cplx inner_product(const WavefunctionGrid& a, const WavefunctionGrid& b);

  WavefunctionGrid& operator*=(cplx s);
  WavefunctionGrid& operator+=(const WavefunctionGrid& o);

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid_.ny) +
           static_cast<std::size_t>(j);
  }
  SpatialGrid grid_;
  Storage data_;
};

/// phi_n(x; w1) phi_k(y; w2) on the grid.
WavefunctionGrid initial_state(const FockLabel& label, double w1, double w2,
                               const SpatialGrid& grid);

struct SplitOperatorOptions {
  int n_steps = 1 << 14;
  /// Call `observer` every this many steps (and at the end); 0 disables.
  int record_every = 0;
  std::function<void(double t, const WavefunctionGrid&)> observer;
  double norm_tolerance = 1e-6;
  double boundary_tolerance = 1e-4;
};

/// Strang splitting: half potential kick with M(t + dt/2), full kinetic step,
/// half kick. Consecutive half kicks are fused. Throws PropagationQuality on
/// norm drift or amplitude reaching the grid boundary.
WavefunctionGrid split_operator_evolve(const WavefunctionGrid& psi0, const PotentialSchedule& drive,
                                       const SplitOperatorOptions& options = {});
WavefunctionGrid split_operator_evolve(const WavefunctionGrid& psi0, const ProtocolSpec& spec,
                                       int n_steps = 1 << 14);

/// <p^2/2 + X^T M X / 2> / <psi|psi>, kinetic part by FFT.
double energy_expectation(const WavefunctionGrid& psi, const SymMat2& M);

struct FinalAnalysis {
  std::map<FockLabel, cplx> amplitudes;
  std::map<FockLabel, double> populations;
  double energy = 0.0;
  double norm = 0.0;
  double leakage = 0.0;  // 1 - sum of populations up to the cutoff
  bool leakage_warning = false;
};

/// Projects onto the final eigenstates |m, l>_f, m + l <= cutoff, built in the
/// final frame rotated by `frame_angle` with mode frequencies wx, wy.
FinalAnalysis analyze_final(const WavefunctionGrid& psi, const SymMat2& final_M,
                            double frame_angle, double wx, double wy, int cutoff);
FinalAnalysis analyze_final(const WavefunctionGrid& psi, const ProtocolSpec& spec, int cutoff);

}  // namespace oscswap
