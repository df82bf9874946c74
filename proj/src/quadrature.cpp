#include "curveflow/quadrature.hpp"

#include <cmath>

namespace curveflow {

Moments oscillatory_moments(double b, double c) {
  const double x = b * c;
  if (std::abs(x) < 1.0) {
    // Power series; 14 terms reach double precision for |x| < 1.
    double s0 = 0, s1 = 0, s2 = 0;
    double even_term = 1.0;  // (-1)^n x^(2n) / (2n)!
    double odd_term = x;     // (-1)^n x^(2n+1) / (2n+1)!
    for (int n = 0; n < 14; ++n) {
      s0 += even_term / (2 * n + 1);
      s2 += even_term / (2 * n + 3);
      s1 += odd_term / (2 * n + 3);
      even_term *= -x * x / ((2 * n + 1) * (2 * n + 2));
      odd_term *= -x * x / ((2 * n + 2) * (2 * n + 3));
    }
    return {cplx(2.0 * c * s0, 0.0), cplx(0.0, 2.0 * c * c * s1), cplx(2.0 * c * c * c * s2, 0.0)};
  }
  const double sx = std::sin(x), cx = std::cos(x);
  const double m0 = 2.0 * sx / b;
  const double m1 = 2.0 * (sx - x * cx) / (b * b);
  const double m2 = 2.0 * (c * c * sx / b + 2.0 * c * cx / (b * b) - 2.0 * sx / (b * b * b));
  return {cplx(m0, 0.0), cplx(0.0, m1), cplx(m2, 0.0)};
}

cplx filon_panel(double c, double phi0, double phi1, double phi2, cplx a_left, cplx a_mid,
                 cplx a_right) {
  const cplx a0 = a_mid;
  const cplx a1 = (a_right - a_left) / (2.0 * c);
  const cplx a2 = (a_right - 2.0 * a_mid + a_left) / (2.0 * c * c);
  const Moments m = oscillatory_moments(phi1, c);
  // First-order correction for the curvature of the phase.
  const cplx body = a0 * m.m0 + a1 * m.m1 + a2 * m.m2 + cplx(0.0, 0.5 * phi2) * a0 * m.m2;
  if (phi0 == 0.0) return body;
  return cplx(std::cos(phi0), std::sin(phi0)) * body;
}

}  // namespace curveflow
