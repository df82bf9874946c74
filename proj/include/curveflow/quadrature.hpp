#pragma once

#include <complex>

namespace curveflow {

using cplx = std::complex<double>;

// Moments  int_{-c}^{c} s^j e^{i b s} ds  for j = 0, 1, 2.
struct Moments {
  cplx m0, m1, m2;
};
Moments oscillatory_moments(double b, double c);

// Integral over a panel of half-width c centred at m of e^{i phi(t)} a(t), where phi is
// expanded to second order at m (phi0, phi1, phi2) and a is the quadratic through its
// values at m - c, m, m + c. With phi1 = phi2 = 0 this is Simpson's rule.
cplx filon_panel(double c, double phi0, double phi1, double phi2, cplx a_left, cplx a_mid,
                 cplx a_right);

// Composite Simpson on [a, b] with an even number n of subintervals.
template <class F>
auto simpson(F&& f, double a, double b, long long n) -> decltype(f(a)) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  auto acc = f(a) + f(b);
  for (long long i = 1; i < n; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return acc * (h / 3.0);
}

}  // namespace curveflow
