#pragma once

// Small fixed-size 2x2 matrix types used throughout the protocol design.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>

namespace oscswap {

using cplx = std::complex<double>;

template <class T>
struct Mat2 {
  T m00{}, m01{}, m10{}, m11{};

  static constexpr Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
  static constexpr Mat2 zero() { return {}; }

  constexpr T operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? m00 : m01) : (j == 0 ? m10 : m11);
  }
  constexpr T& at(int i, int j) {
    return i == 0 ? (j == 0 ? m00 : m01) : (j == 0 ? m10 : m11);
  }

  constexpr Mat2& operator+=(const Mat2& o) {
    m00 += o.m00; m01 += o.m01; m10 += o.m10; m11 += o.m11;
    return *this;
  }
  constexpr Mat2& operator-=(const Mat2& o) {
    m00 -= o.m00; m01 -= o.m01; m10 -= o.m10; m11 -= o.m11;
    return *this;
  }
};

using RMat2 = Mat2<double>;
using CMat2 = Mat2<cplx>;

template <class T>
constexpr Mat2<T> operator+(Mat2<T> a, const Mat2<T>& b) { return a += b; }
template <class T>
constexpr Mat2<T> operator-(Mat2<T> a, const Mat2<T>& b) { return a -= b; }
template <class T>
constexpr Mat2<T> operator-(const Mat2<T>& a) { return {-a.m00, -a.m01, -a.m10, -a.m11}; }

template <class T>
constexpr Mat2<T> operator*(const Mat2<T>& a, const Mat2<T>& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}
template <class T, class S>
constexpr Mat2<T> operator*(S s, const Mat2<T>& a) {
  return {T(s) * a.m00, T(s) * a.m01, T(s) * a.m10, T(s) * a.m11};
}

inline CMat2 to_complex(const RMat2& a) { return {a.m00, a.m01, a.m10, a.m11}; }
inline RMat2 real_part(const CMat2& a) {
  return {a.m00.real(), a.m01.real(), a.m10.real(), a.m11.real()};
}
inline RMat2 imag_part(const CMat2& a) {
  return {a.m00.imag(), a.m01.imag(), a.m10.imag(), a.m11.imag()};
}

template <class T>
constexpr Mat2<T> transpose(const Mat2<T>& a) { return {a.m00, a.m10, a.m01, a.m11}; }
inline CMat2 adjoint(const CMat2& a) {
  return {std::conj(a.m00), std::conj(a.m10), std::conj(a.m01), std::conj(a.m11)};
}

template <class T>
constexpr T det(const Mat2<T>& a) { return a.m00 * a.m11 - a.m01 * a.m10; }
template <class T>
constexpr T trace(const Mat2<T>& a) { return a.m00 + a.m11; }

template <class T>
std::optional<Mat2<T>> inverse(const Mat2<T>& a) {
  const T d = det(a);
  if (std::abs(d) == 0.0) return std::nullopt;
  const T inv = T(1) / d;
  return Mat2<T>{a.m11 * inv, -a.m01 * inv, -a.m10 * inv, a.m00 * inv};
}

template <class T>
double max_abs(const Mat2<T>& a) {
  return std::max(std::max(std::abs(a.m00), std::abs(a.m01)),
                  std::max(std::abs(a.m10), std::abs(a.m11)));
}

// {x, y} = xy + yx
template <class T>
constexpr Mat2<T> anticommutator(const Mat2<T>& x, const Mat2<T>& y) { return x * y + y * x; }
// [x, y] = xy - yx
template <class T>
constexpr Mat2<T> commutator(const Mat2<T>& x, const Mat2<T>& y) { return x * y - y * x; }
// [x, y]_z = x z y - y z x
template <class T>
constexpr Mat2<T> sandwiched_commutator(const Mat2<T>& x, const Mat2<T>& y, const Mat2<T>& z) {
  return x * z * y - y * z * x;
}

/// Real symmetric 2x2 matrix stored by its three independent entries.
struct SymMat2 {
  double a11{}, a12{}, a22{};

  constexpr RMat2 full() const { return {a11, a12, a12, a22}; }
  CMat2 cfull() const { return to_complex(full()); }
  constexpr double det() const { return a11 * a22 - a12 * a12; }
  constexpr double trace() const { return a11 + a22; }
  constexpr bool positive_definite() const { return a11 > 0.0 && det() > 0.0; }

  friend constexpr SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
  }
  friend constexpr SymMat2 operator-(const SymMat2& a, const SymMat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22};
  }
  friend constexpr SymMat2 operator*(double s, const SymMat2& a) {
    return {s * a.a11, s * a.a12, s * a.a22};
  }
  friend constexpr bool operator==(const SymMat2&, const SymMat2&) = default;
};

inline double max_abs(const SymMat2& a) {
  return std::max({std::abs(a.a11), std::abs(a.a12), std::abs(a.a22)});
}

/// Eigen-decomposition of a real symmetric 2x2 matrix. `angle` is the polar
/// angle of the eigenvector belonging to `upper` (the larger eigenvalue),
/// in (-pi/2, pi/2].
struct SymEigen2 {
  double upper;
  double lower;
  double angle;
};

inline SymEigen2 eigen(const SymMat2& m) {
  const double mean = 0.5 * (m.a11 + m.a22);
  const double half_diff = 0.5 * (m.a11 - m.a22);
  const double radius = std::hypot(half_diff, m.a12);
  return {mean + radius, mean - radius, 0.5 * std::atan2(2.0 * m.a12, m.a11 - m.a22)};
}

/// Rotation W(theta) = [[cos, sin], [-sin, cos]] taking lab (x, y) to principal (q1, q2).
inline RMat2 rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, -s, c};
}

/// W^T diag(d1, d2) W
inline SymMat2 from_principal(double theta, double d1, double d2) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {d1 * c * c + d2 * s * s, (d1 - d2) * s * c, d1 * s * s + d2 * c * c};
}

/// Spectral power of a positive-definite symmetric matrix.
inline SymMat2 spd_power(const SymMat2& m, double p) {
  const SymEigen2 e = eigen(m);
  return from_principal(e.angle, std::pow(e.upper, p), std::pow(e.lower, p));
}

/// Solves X S + S X = B for X by flattening to a 4x4 linear system
/// (row-major vec) and eliminating with partial pivoting. Returns nullopt when
/// the system is singular, i.e. S has eigenvalues summing to zero.
template <class T>
std::optional<Mat2<T>> solve_anticommutator(const SymMat2& s, const Mat2<T>& b) {
  const RMat2 sf = s.full();
  std::array<std::array<T, 5>, 4> a{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto& row = a[2 * i + j];
      for (int l = 0; l < 2; ++l) row[2 * i + l] += T(sf(l, j));
      for (int k = 0; k < 2; ++k) row[2 * k + j] += T(sf(i, k));
      row[4] = b(i, j);
    }
  }
  double scale = 0.0;
  for (const auto& row : a)
    for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(row[c]));
  if (scale == 0.0) return std::nullopt;

  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-14 * scale) return std::nullopt;
    std::swap(a[col], a[pivot]);
    for (int r = col + 1; r < 4; ++r) {
      const T f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<T, 4> x{};
  for (int r = 3; r >= 0; --r) {
    T acc = a[r][4];
    for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return Mat2<T>{x[0], x[1], x[2], x[3]};
}

}  // namespace oscswap
