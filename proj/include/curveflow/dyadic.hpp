#pragma once

#include <optional>

#include "curveflow/curve.hpp"
#include "curveflow/grid.hpp"

namespace curveflow {

// Smooth step: 1 on [0,1], 0 on [2,inf).
double smooth_step(double s);

// Even dyadic bump psi(t) = eta(|t|) - eta(2|t|), supported on 1/2 <= |t| <= 2.
class BumpFunction {
 public:
  double operator()(double t) const;
  // psi_l(t) = psi(2^-l t)
  double dilate(int l, double t) const;
  // sum over k <= top of psi_k(t) = eta(2^-top |t|)
  double low_sum(int top, double t) const;
  static constexpr bool even = true;
};

BumpFunction make_bump();

// Cutoff equal to 1 on 1/2 <= |xi| <= 2 and supported on 1/4 <= |xi| <= 4.
class FrequencyCutoff {
 public:
  double operator()(double xi) const;
  double dilate(int l, double xi) const;
};

enum class Projection { P, PP };

// Largest l with 2^(l+2) below the angular Nyquist frequency pi/step2.
int max_resolvable_level(double step2);

// Multiplies the second-variable discrete spectrum by psi_l (P) or rho_l (PP).
GridFunction2D project(const GridFunction2D& f, int l, Projection which);

// Largest n with gamma(2^n) <= 1/(2^l u_abs); nullopt when u_abs == 0 (no high part).
std::optional<int> frequency_index(double u_abs, const Curve& curve, int l);

namespace reference {
// Same multiplier applied through a direct O(n^2) transform per row.
GridFunction2D project(const GridFunction2D& f, int l, Projection which);
}  // namespace reference

}  // namespace curveflow
