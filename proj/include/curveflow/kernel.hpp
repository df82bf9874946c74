#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include "curveflow/curve.hpp"
#include "curveflow/dyadic.hpp"
#include "curveflow/grid.hpp"

namespace curveflow {

// Parameters of the rescaled composition kernel between two points x and z.
// The constructor orders the points so that n_x <= n_z, hence h = 2^(n_x - n_z) <= 1.
struct PhaseParams {
  int k = 0;
  int n_x = 0, n_z = 0;
  double u_x = 0, u_z = 0;
  double h = 1;
  double s = 0;
  Curve curve;
  bool swapped = false;

  PhaseParams(int k, int n_x, int n_z, double u_x, double u_z, double s, Curve curve);

  double scale_x() const { return std::ldexp(1.0, n_x + k); }
  double scale_z() const { return std::ldexp(1.0, n_z + k); }
};

// Q(t) = u_x gamma(2^(n_x+k) t) - u_z gamma(2^(n_z+k) (h t - s)) and its first two derivatives.
double phase(const PhaseParams& p, double t, int order);

// int e^{iQ(t)} psi(ht - s)/(ht - s) psi(t)/t dt over the common support.
cplx kernel_integral(const PhaseParams& p, const BumpFunction& bump, double base_step = 1e-3);

// Same integral by uniform composite Simpson with a step that samples each oscillation
// at least 8 times; slow, used as an oracle.
cplx kernel_integral_reference(const PhaseParams& p, const BumpFunction& bump,
                               double base_step = 1e-3);

// Characteristic-function shape of the kernel bound.
double kernel_shape(int k, double s, double r1, double r2);

struct KernelSample {
  int k;
  double s;
  double h;
  double lhs;
  double shape;
  double ratio;
  bool case_a;
};

struct KernelEstimateReport {
  double r1 = 0.125, r2 = 7.0 / 16.0;
  double case_threshold = 0;  // 1 / (4 c1^3 c4)
  CurveConstants constants;
  std::vector<KernelSample> samples;
  std::map<int, double> per_k_max;  // max lhs/shape per k
  double c_hat = 0;
  // c_hat over all k divided by the per-k max at the smallest k.
  double c_hat_growth = 0;
  // max over k of per-k max divided by min over k of per-k max.
  double per_k_spread = 0;
  bool support_zero = true;  // lhs == 0 exactly wherever |s| > 2 + 2h
  bool bound_holds = true;   // lhs <= c_hat * shape everywhere
};

KernelEstimateReport verify_kernel_bound(const Curve& curve, const std::vector<PhaseParams>& samples,
                                         double r1 = 0.125, double r2 = 7.0 / 16.0);

// ---- lemma checkers ----

struct PhaseValues {
  double phi, d1, d2;
};
using PhaseEval = std::function<PhaseValues(double)>;

struct VanDerCorputResult {
  double lhs, rhs, sigma1, sigma2;
  bool pass;
};
VanDerCorputResult van_der_corput_check(const PhaseEval& phase_eval, double a, double b,
                                        int samples = 1000);

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Vector2 = std::array<double, 2>;

double spectral_norm(const Matrix2& a);

struct MatrixBoundResult {
  double lhs, rhs;
  bool pass;
};
MatrixBoundResult matrix_lower_bound_check(const Matrix2& a, const Vector2& x);

// Maximal runs of window samples where |a gamma'(t) - b gamma'(t - c)| > d, with t = 0 and
// t = c punctured. `resolution` is the number of subintervals of the window.
int interval_count(const Curve& curve, double a, double b, double c, double d, double lo,
                   double hi, int resolution);

struct CaseBMatrix {
  Matrix2 m;
  Vector2 upsilon;
  double det;
  double norm;
  double upsilon_norm;
  double lower_bound;  // |det| / norm * |upsilon|
};
CaseBMatrix case_b_matrix(const PhaseParams& p, double t);

// Explicit small-h bounds: lower bound on |Q'| and upper bound on |Q''| over the support.
double case_a_slope_lower(const PhaseParams& p, const CurveConstants& c);
double case_a_curvature_upper(const PhaseParams& p, const CurveConstants& c);
double case_a_threshold(const CurveConstants& c);

}  // namespace curveflow
