#pragma once

#include <cmath>
#include <functional>

#include "curveflow/grid.hpp"

namespace testutil {

using curveflow::cplx;
using curveflow::GridFunction1D;

// Samples g on [lo, lo + (n-1) h].
inline GridFunction1D sample(double lo, double h, std::size_t n, const std::function<cplx(double)>& g) {
  GridFunction1D f(curveflow::Grid1D{lo, h, n});
  for (std::size_t i = 0; i < n; ++i) f.values[i] = g(f.x(i));
  return f;
}

// Indicator of [a, b] with half weight at grid points equal to a or b.
inline GridFunction1D indicator(double a, double b, double lo, double h, std::size_t n) {
  return sample(lo, h, n, [=](double x) -> cplx {
    const double tol = 1e-9 * h;
    if (std::abs(x - a) < tol || std::abs(x - b) < tol) return 0.5;
    return (x > a && x < b) ? 1.0 : 0.0;
  });
}

inline double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
