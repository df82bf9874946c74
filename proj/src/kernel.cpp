#include "curveflow/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "curveflow/errors.hpp"
#include "curveflow/quadrature.hpp"

namespace curveflow {

PhaseParams::PhaseParams(int k_, int n_x_, int n_z_, double u_x_, double u_z_, double s_,
                         Curve curve_)
    : k(k_), n_x(n_x_), n_z(n_z_), u_x(u_x_), u_z(u_z_), s(s_), curve(std::move(curve_)) {
  if (k < 0) throw std::invalid_argument("kernel scale k must be >= 0");
  if (n_x > n_z) {
    // Exchange the two points: xi -> -xi, and s is measured against the new n_z.
    s = -s * std::ldexp(1.0, n_z - n_x);
    std::swap(n_x, n_z);
    std::swap(u_x, u_z);
    swapped = true;
  }
  h = std::ldexp(1.0, n_x - n_z);
}

double phase(const PhaseParams& p, double t, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("phase order must be 0, 1 or 2");
  if (p.u_x == 0.0 && p.u_z == 0.0) return 0.0;
  const double a = p.scale_x(), b = p.scale_z();
  const double tx = a * t, tz = b * (p.h * t - p.s);
  switch (order) {
    case 0: return p.u_x * p.curve(tx, 0) - p.u_z * p.curve(tz, 0);
    case 1: return p.u_x * a * p.curve(tx, 1) - p.u_z * b * p.h * p.curve(tz, 1);
    default:
      return p.u_x * a * a * p.curve(tx, 2) - p.u_z * b * b * p.h * p.h * p.curve(tz, 2);
  }
}

namespace {

struct Span {
  double lo, hi;
};

// Pieces of t where both psi(t) and psi(ht - s) can be nonzero.
std::vector<Span> common_support(const PhaseParams& p) {
  const Span own[2] = {{-2.0, -0.5}, {0.5, 2.0}};
  const Span other[2] = {{(p.s - 2.0) / p.h, (p.s - 0.5) / p.h}, {(p.s + 0.5) / p.h, (p.s + 2.0) / p.h}};
  std::vector<Span> out;
  for (const auto& a : own) {
    for (const auto& b : other) {
      const Span c{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
      if (c.hi > c.lo) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [](const Span& x, const Span& y) { return x.lo < y.lo; });
  return out;
}

double kernel_amplitude(const PhaseParams& p, const BumpFunction& bump, double t) {
  const double w = p.h * t - p.s;
  return bump(w) / w * bump(t) / t;
}

}  // namespace

cplx kernel_integral(const PhaseParams& p, const BumpFunction& bump, double base_step) {
  if (std::abs(p.s) > 4.0) return 0.0;
  constexpr double curvature_tol = 1e-4;
  cplx total = 0;
  for (const auto& sp : common_support(p)) {
    double t = sp.lo;
    double a0 = kernel_amplitude(p, bump, t);
    while (t < sp.hi) {
      double w = base_step;
      const double q2 = std::abs(phase(p, t, 2));
      if (q2 > 0) w = std::min(w, std::sqrt(8.0 * curvature_tol / q2));
      double t1 = t + w;
      if (t1 >= sp.hi || sp.hi - t1 < 1e-3 * w) t1 = sp.hi;
      const double mid = 0.5 * (t + t1), c = 0.5 * (t1 - t);
      const double am = kernel_amplitude(p, bump, mid), a1 = kernel_amplitude(p, bump, t1);
      total += filon_panel(c, phase(p, mid, 0), phase(p, mid, 1), phase(p, mid, 2), a0, am, a1);
      a0 = a1;
      t = t1;
    }
  }
  return total;
}

cplx kernel_integral_reference(const PhaseParams& p, const BumpFunction& bump, double base_step) {
  if (std::abs(p.s) > 4.0) return 0.0;
  cplx total = 0;
  for (const auto& sp : common_support(p)) {
    double slope = 0;
    for (int i = 0; i <= 256; ++i) {
      slope = std::max(slope, std::abs(phase(p, sp.lo + (sp.hi - sp.lo) * i / 256.0, 1)));
    }
    const double step = std::min(base_step, 1.0 / (8.0 * (1.0 + slope)));
    const auto n = static_cast<long long>(std::ceil((sp.hi - sp.lo) / step));
    total += simpson(
        [&](double t) { return std::polar(kernel_amplitude(p, bump, t), phase(p, t, 0)); }, sp.lo,
        sp.hi, std::max<long long>(n, 2));
  }
  return total;
}

double kernel_shape(int k, double s, double r1, double r2) {
  const double a = std::abs(s);
  double v = 0;
  if (a <= std::exp2(-k * r1)) v += 1.0;
  if (a <= 4.0) v += std::exp2(-k * r2);
  return v;
}

double case_a_threshold(const CurveConstants& c) { return 1.0 / (4.0 * c.c1 * c.c1 * c.c1 * c.c4); }

namespace {

double derivative_growth(const PhaseParams& p) {
  return p.curve(std::ldexp(1.0, p.n_x + p.k), 1) / p.curve(std::ldexp(1.0, p.n_x), 1);
}

}  // namespace

double case_a_slope_lower(const PhaseParams& p, const CurveConstants& c) {
  return std::ldexp(1.0, p.k) * derivative_growth(p) / (4.0 * c.c1 * c.c1);
}

double case_a_curvature_upper(const PhaseParams& p, const CurveConstants& c) {
  return 4.0 * c.c1 * c.c2 * c.c4 * std::ldexp(1.0, p.k) * derivative_growth(p);
}

KernelEstimateReport verify_kernel_bound(const Curve& curve, const std::vector<PhaseParams>& samples,
                                         double r1, double r2) {
  if (samples.empty()) throw std::invalid_argument("verify_kernel_bound needs samples");
  KernelEstimateReport rep;
  rep.r1 = r1;
  rep.r2 = r2;
  rep.constants = check_conditions(curve).constants;
  rep.case_threshold = case_a_threshold(rep.constants);
  rep.samples.resize(samples.size());
  const BumpFunction bump;
  const auto n = static_cast<long long>(samples.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < n; ++i) {
    const auto& p = samples[static_cast<std::size_t>(i)];
    KernelSample ks{p.k, p.s, p.h, 0, 0, 0, p.h <= rep.case_threshold};
    ks.lhs = std::abs(kernel_integral(p, bump));
    ks.shape = kernel_shape(p.k, p.s, r1, r2);
    ks.ratio = ks.shape > 0 ? ks.lhs / ks.shape : 0.0;
    rep.samples[static_cast<std::size_t>(i)] = ks;
  }
  for (const auto& ks : rep.samples) {
    rep.c_hat = std::max(rep.c_hat, ks.ratio);
    auto [it, inserted] = rep.per_k_max.emplace(ks.k, ks.ratio);
    if (!inserted) it->second = std::max(it->second, ks.ratio);
    if (std::abs(ks.s) > 2.0 + 2.0 * ks.h && ks.lhs != 0.0) rep.support_zero = false;
  }
  for (const auto& ks : rep.samples) {
    if (ks.lhs > rep.c_hat * ks.shape) rep.bound_holds = false;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& [k, v] : rep.per_k_max) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  rep.per_k_spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  const double first = rep.per_k_max.begin()->second;
  rep.c_hat_growth = first > 0 ? rep.c_hat / first : std::numeric_limits<double>::infinity();
  return rep;
}

// ---- lemma checkers ----

VanDerCorputResult van_der_corput_check(const PhaseEval& phase_eval, double a, double b,
                                        int samples) {
  if (!(a < b)) throw std::invalid_argument("van der Corput check needs a < b");
  if (samples < 2) throw std::invalid_argument("van der Corput check needs at least 2 samples");
  VanDerCorputResult r{0, 0, std::numeric_limits<double>::infinity(), 0, false};
  double prev_d1 = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = a + (b - a) * i / (samples - 1);
    const PhaseValues v = phase_eval(t);
    if (i > 0 && (v.d1 > 0) != (prev_d1 > 0)) {
      throw HypothesisViolated("phase derivative changes sign on the interval");
    }
    prev_d1 = v.d1;
    r.sigma1 = std::min(r.sigma1, std::abs(v.d1));
    r.sigma2 = std::max(r.sigma2, std::abs(v.d2));
  }
  if (r.sigma1 == 0.0) throw HypothesisViolated("phase derivative vanishes on the interval");

  const auto panels = static_cast<long long>(
      std::max(256.0, std::ceil((b - a) * std::sqrt(r.sigma2 / 2e-4))));
  const double w = (b - a) / static_cast<double>(panels);
  cplx acc = 0;
  for (long long j = 0; j < panels; ++j) {
    const double mid = a + (static_cast<double>(j) + 0.5) * w;
    const PhaseValues v = phase_eval(mid);
    acc += filon_panel(0.5 * w, v.phi, v.d1, v.d2, 1.0, 1.0, 1.0);
  }
  r.lhs = std::abs(acc);
  r.rhs = 2.0 / r.sigma1 + (b - a) * r.sigma2 / (r.sigma1 * r.sigma1);
  r.pass = r.lhs <= r.rhs + 1e-8;
  return r;
}

double spectral_norm(const Matrix2& a) {
  const double ss = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double disc = std::max(0.0, ss * ss - 4.0 * det * det);
  return std::sqrt(0.5 * (ss + std::sqrt(disc)));
}

MatrixBoundResult matrix_lower_bound_check(const Matrix2& a, const Vector2& x) {
  const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  if (std::abs(det) <= 1e-12) throw HypothesisViolated("matrix is numerically singular");
  const double y0 = a[0][0] * x[0] + a[0][1] * x[1];
  const double y1 = a[1][0] * x[0] + a[1][1] * x[1];
  MatrixBoundResult r;
  r.lhs = std::hypot(y0, y1);
  r.rhs = std::abs(det) / spectral_norm(a) * std::hypot(x[0], x[1]);
  r.pass = r.lhs >= r.rhs - 1e-9 * (1.0 + r.rhs);
  return r;
}

int interval_count(const Curve& curve, double a, double b, double c, double d, double lo,
                   double hi, int resolution) {
  if (!(d > 0)) throw std::invalid_argument("interval_count needs d > 0");
  if (resolution < 1000) throw std::invalid_argument("interval_count needs resolution >= 1000");
  if (!(lo < hi)) throw std::invalid_argument("interval_count needs a nonempty window");
  const double step = (hi - lo) / resolution;
  const double puncture = 10.0 * step;
  int runs = 0;
  bool inside = false;
  for (int i = 0; i <= resolution; ++i) {
    const double t = lo + step * i;
    if (std::abs(t) < puncture || std::abs(t - c) < puncture) continue;
    const bool holds = std::abs(a * curve(t, 1) - b * curve(t - c, 1)) > d;
    if (holds && !inside) ++runs;
    inside = holds;
  }
  return runs;
}

CaseBMatrix case_b_matrix(const PhaseParams& p, double t) {
  const double a = p.scale_x(), b = p.scale_z();
  const double tx = a * t, tz = b * (p.h * t - p.s);
  const double gx1 = p.curve(tx, 1), gz1 = p.curve(tz, 1);
  if (gx1 == 0.0 || gz1 == 0.0) throw HypothesisViolated("curve derivative vanishes");
  CaseBMatrix r;
  r.m = {{{1.0, p.h}, {a * p.curve(tx, 2) / gx1, b * p.curve(tz, 2) / gz1 * p.h * p.h}}};
  r.upsilon = {p.u_x * a * gx1, -p.u_z * b * gz1};
  r.det = std::abs(r.m[0][0] * r.m[1][1] - r.m[0][1] * r.m[1][0]);
  r.norm = spectral_norm(r.m);
  r.upsilon_norm = std::hypot(r.upsilon[0], r.upsilon[1]);
  r.lower_bound = r.det / r.norm * r.upsilon_norm;
  return r;
}

}  // namespace curveflow
