#pragma once

#include "oscswap/mat2.hpp"

namespace oscswap::detail {

/// One RK4 step of the linear system x'' = -M(t) x, written once for real
/// and complex state so that both paths perform identical arithmetic.
template <class T>
inline void rk4_linear_step(T& x, T& y, T& px, T& py, const SymMat2& m0, const SymMat2& mh,
                            const SymMat2& m1, double h) {
  const double h2 = 0.5 * h;
  const double h6 = h / 6.0;

  const T k1x = px;
  const T k1y = py;
  const T k1px = -(m0.a11 * x + m0.a12 * y);
  const T k1py = -(m0.a12 * x + m0.a22 * y);

  const T x2 = x + h2 * k1x;
  const T y2 = y + h2 * k1y;
  const T px2 = px + h2 * k1px;
  const T py2 = py + h2 * k1py;
  const T k2px = -(mh.a11 * x2 + mh.a12 * y2);
  const T k2py = -(mh.a12 * x2 + mh.a22 * y2);

  const T x3 = x + h2 * px2;
  const T y3 = y + h2 * py2;
  const T px3 = px + h2 * k2px;
  const T py3 = py + h2 * k2py;
  const T k3px = -(mh.a11 * x3 + mh.a12 * y3);
  const T k3py = -(mh.a12 * x3 + mh.a22 * y3);

  const T x4 = x + h * px3;
  const T y4 = y + h * py3;
  const T px4 = px + h * k3px;
  const T py4 = py + h * k3py;
  const T k4px = -(m1.a11 * x4 + m1.a12 * y4);
  const T k4py = -(m1.a12 * x4 + m1.a22 * y4);

  x = x + h6 * (k1x + 2.0 * px2 + 2.0 * px3 + px4);
  y = y + h6 * (k1y + 2.0 * py2 + 2.0 * py3 + py4);
  px = px + h6 * (k1px + 2.0 * k2px + 2.0 * k3px + k4px);
  py = py + h6 * (k1py + 2.0 * k2py + 2.0 * k3py + k4py);
}

}  // namespace oscswap::detail
