#include "curveflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "curveflow/errors.hpp"
#include "curveflow/quadrature.hpp"

namespace curveflow {

void PVConfig::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(radius > epsilon)) throw std::invalid_argument("radius must exceed epsilon");
  if (!(substep > 0)) throw std::invalid_argument("substep must be positive");
  if (substep > epsilon * (1 + 1e-12)) throw std::invalid_argument("substep must not exceed epsilon");
  if (!(growth > 0)) throw std::invalid_argument("growth must be positive");
  if (!(phase_tolerance > 0)) throw std::invalid_argument("phase_tolerance must be positive");
}

std::pair<double, double> ShiftedInterval::left_piece() const {
  const double s = sigma * length();
  return {a - s, b - s};
}

std::pair<double, double> ShiftedInterval::right_piece() const {
  const double s = sigma * length();
  return {a + s, b + s};
}

namespace {

constexpr double kNegligible = 1e-9;

struct Interval {
  double lo, hi;
};

// x-range outside of which the linear interpolant of f vanishes.
struct Support {
  double lo = 0, hi = 0;
  bool empty = true;
};

Support support_1d(const GridFunction1D& f) {
  Support s;
  std::size_t first = f.size(), last = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] != cplx{}) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == f.size()) return s;
  s.empty = false;
  s.lo = f.x(first > 0 ? first - 1 : 0);
  s.hi = f.x(std::min(last + 1, f.size() - 1));
  return s;
}

Support support_rows(const GridFunction2D& f) {
  Support s;
  std::size_t first = f.n1, last = 0;
  for (std::size_t i = 0; i < f.n1; ++i) {
    for (std::size_t j = 0; j < f.n2; ++j) {
      if (f(i, j) != cplx{}) {
        first = std::min(first, i);
        last = i;
        break;
      }
    }
  }
  if (first == f.n1) return s;
  s.empty = false;
  s.lo = f.x1(first > 0 ? first - 1 : 0);
  s.hi = f.x1(std::min(last + 1, f.n1 - 1));
  return s;
}

// t in [tmin, tmax] where f(x - t) or f(x + t) can be nonzero.
int t_ranges(const Support& s, double x, double tmin, double tmax, Interval out[2]) {
  if (s.empty) return 0;
  Interval a{std::max(tmin, x - s.hi), std::min(tmax, x - s.lo)};
  Interval b{std::max(tmin, s.lo - x), std::min(tmax, s.hi - x)};
  const bool ha = a.hi > a.lo, hb = b.hi > b.lo;
  if (!ha && !hb) return 0;
  if (ha && !hb) { out[0] = a; return 1; }
  if (!ha && hb) { out[0] = b; return 1; }
  if (a.lo > b.lo) std::swap(a, b);
  if (b.lo <= a.hi) {
    out[0] = {a.lo, std::max(a.hi, b.hi)};
    return 1;
  }
  out[0] = a;
  out[1] = b;
  return 2;
}

void check_coverage(double grid_lo, double grid_hi, double need_lo, double need_hi,
                    double edge_lo, double edge_hi, double scale, const char* axis) {
  const double tol = kNegligible * scale;
  if (need_lo < grid_lo && edge_lo > tol) {
    std::ostringstream os;
    os << "grid function does not cover the needed " << axis << " translates: missing ["
       << need_lo << ", " << grid_lo << "]";
    throw CoverageError(os.str(), need_lo, grid_lo);
  }
  if (need_hi > grid_hi && edge_hi > tol) {
    std::ostringstream os;
    os << "grid function does not cover the needed " << axis << " translates: missing ["
       << grid_hi << ", " << need_hi << "]";
    throw CoverageError(os.str(), grid_hi, need_hi);
  }
}

void check_coverage_1d(const GridFunction1D& f, double need_lo, double need_hi) {
  check_coverage(f.origin, f.last(), need_lo, need_hi, std::abs(f.values.front()),
                 std::abs(f.values.back()), max_abs(f.values), "x");
}

void check_coverage_2d(const GridFunction2D& f, double need1_lo, double need1_hi, double shift2) {
  double first_row = 0, last_row = 0, first_col = 0, last_col = 0;
  for (std::size_t j = 0; j < f.n2; ++j) {
    first_row = std::max(first_row, std::abs(f(0, j)));
    last_row = std::max(last_row, std::abs(f(f.n1 - 1, j)));
  }
  for (std::size_t i = 0; i < f.n1; ++i) {
    first_col = std::max(first_col, std::abs(f(i, 0)));
    last_col = std::max(last_col, std::abs(f(i, f.n2 - 1)));
  }
  const double scale = max_abs(f.values);
  check_coverage(f.x1(0), f.x1(f.n1 - 1), need1_lo, need1_hi, first_row, last_row, scale, "x1");
  if (f.x2_boundary == X2Boundary::zero) {
    const double lo = f.x2(0), hi = f.x2(f.n2 - 1);
    check_coverage(lo, hi, lo - shift2, hi + shift2, first_col, last_col, scale, "x2");
  }
}

struct PanelRule {
  double min_width;
  double growth;
  double max_width;
  double phase_tolerance;
};

// Panel width at t > 0 for modulation strength u along the curve.
double panel_width(const PanelRule& r, double t, double u, const Curve& curve) {
  double w = std::min(std::max(r.min_width, r.growth * t), r.max_width);
  if (u != 0.0) {
    const double curv = std::abs(u * curve(t, 2));
    if (curv > 0) w = std::min(w, std::sqrt(8.0 * r.phase_tolerance / curv));
  }
  return std::max(w, 1e-12 * (1.0 + t));
}

template <class Width, class Panel>
void march(double a, double b, Width&& width, Panel&& panel) {
  double t = a;
  while (t < b) {
    const double w = width(t);
    double t1 = t + w;
    if (t1 >= b || b - t1 < 1e-3 * w) t1 = b;
    panel(t, t1);
    t = t1;
  }
}

// int_{t in ranges} [e^{i u gamma(t)} f(x-t) - e^{i u gamma(-t)} f(x+t)] win(t) / t dt
template <class Window>
cplx modulated_integral(const GridFunction1D& f, const Support& s, double x, double u,
                        const Curve& curve, double tmin, double tmax, Window&& win,
                        const PanelRule& rule) {
  Interval rs[2];
  const int nr = t_ranges(s, x, tmin, tmax, rs);
  const bool even = curve.parity() == Parity::even;
  cplx total = 0;
  for (int r = 0; r < nr; ++r) {
    auto amp = [&](double t, cplx& minus, cplx& plus) {
      const double wt = win(t) / t;
      minus = f.at(x - t) * wt;
      plus = f.at(x + t) * wt;
    };
    cplx m0, p0;
    amp(rs[r].lo, m0, p0);
    march(
        rs[r].lo, rs[r].hi, [&](double t) { return panel_width(rule, t, u, curve); },
        [&](double t0, double t1) {
          const double mid = 0.5 * (t0 + t1), c = 0.5 * (t1 - t0);
          cplx mm, pm, m1, p1;
          amp(mid, mm, pm);
          amp(t1, m1, p1);
          double q0 = 0, q1 = 0, q2 = 0;
          if (u != 0.0) {
            q0 = u * curve(mid, 0);
            q1 = u * curve(mid, 1);
            q2 = u * curve(mid, 2);
          }
          if (even) {
            total += filon_panel(c, q0, q1, q2, m0 - p0, mm - pm, m1 - p1);
          } else {
            total += filon_panel(c, q0, q1, q2, m0, mm, m1) - filon_panel(c, -q0, -q1, -q2, p0, pm, p1);
          }
          m0 = m1;
          p0 = p1;
        });
  }
  return total;
}

PanelRule rule_from(const PVConfig& cfg, double max_width) {
  return {cfg.substep, cfg.growth, max_width, cfg.phase_tolerance};
}

// Panels for smooth windows at dyadic scale 2^j.
PanelRule annulus_rule(int j, double max_width) {
  const double scale = std::ldexp(1.0, j);
  return {scale / 64.0, 0.0, std::min(scale / 64.0, max_width), 1e-3};
}

template <class Fn>
void parallel_points(std::size_t n, Fn&& fn) {
  const auto nn = static_cast<long long>(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (long long i = 0; i < nn; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace

cplx carleson_at(const GridFunction1D& f, double x, double u, const Curve& curve,
                 const PVConfig& cfg) {
  cfg.validate();
  const Support s = support_1d(f);
  return modulated_integral(f, s, x, u, curve, cfg.epsilon, cfg.radius, [](double) { return 1.0; },
                            rule_from(cfg, 0.5 * f.step));
}

GridFunction1D carleson_apply(const GridFunction1D& f, const ModulationField& u, const Curve& curve,
                              const PVConfig& cfg, const Grid1D& out) {
  cfg.validate();
  check_coverage_1d(f, out.origin - cfg.radius, out.last() + cfg.radius);
  const Support s = support_1d(f);
  const PanelRule rule = rule_from(cfg, 0.5 * f.step);
  GridFunction1D g(out);
  parallel_points(out.n, [&](std::size_t i) {
    const double x = out.x(i);
    g.values[i] = modulated_integral(f, s, x, u(x), curve, cfg.epsilon, cfg.radius,
                                     [](double) { return 1.0; }, rule);
  });
  return g;
}

GridFunction1D carleson_apply(const GridFunction1D& f, const ModulationField& u, const Curve& curve,
                              const PVConfig& cfg) {
  return carleson_apply(f, u, curve, cfg, f.grid());
}

cplx truncated_piece_at(const GridFunction1D& f, double x, double u, const Curve& curve, int k,
                        const BumpFunction& bump) {
  if (k < 0) throw std::invalid_argument("truncated piece needs k >= 0");
  const auto n = frequency_index(std::abs(u), curve, 0);
  if (!n) return 0.0;
  const int j = k + *n;
  const Support s = support_1d(f);
  return modulated_integral(f, s, x, u, curve, std::ldexp(0.5, j), std::ldexp(2.0, j),
                            [&](double t) { return bump.dilate(j, t); },
                            annulus_rule(j, 0.5 * f.step));
}

GridFunction1D truncated_piece_apply(const GridFunction1D& f, const ModulationField& u,
                                     const Curve& curve, int k, const BumpFunction& bump,
                                     const Grid1D& out) {
  if (k < 0) throw std::invalid_argument("truncated piece needs k >= 0");
  std::vector<int> level(out.n, std::numeric_limits<int>::min());
  double reach = 0;
  for (std::size_t i = 0; i < out.n; ++i) {
    const auto n = frequency_index(std::abs(u(out.x(i))), curve, 0);
    if (n) {
      level[i] = k + *n;
      reach = std::max(reach, std::ldexp(2.0, level[i]));
    }
  }
  check_coverage_1d(f, out.origin - reach, out.last() + reach);
  const Support s = support_1d(f);
  GridFunction1D g(out);
  parallel_points(out.n, [&](std::size_t i) {
    if (level[i] == std::numeric_limits<int>::min()) return;
    const int j = level[i];
    const double x = out.x(i);
    g.values[i] = modulated_integral(f, s, x, u(x), curve, std::ldexp(0.5, j), std::ldexp(2.0, j),
                                     [&](double t) { return bump.dilate(j, t); },
                                     annulus_rule(j, 0.5 * f.step));
  });
  return g;
}

GridFunction1D truncated_piece_apply(const GridFunction1D& f, const ModulationField& u,
                                     const Curve& curve, int k, const BumpFunction& bump) {
  return truncated_piece_apply(f, u, curve, k, bump, f.grid());
}

LowFrequencyParts low_frequency_parts(const GridFunction1D& f, const ModulationField& u,
                                      const Curve& curve, const PVConfig& cfg) {
  cfg.validate();
  check_coverage_1d(f, f.origin - cfg.radius, f.last() + cfg.radius);
  const Support s = support_1d(f);
  const PanelRule rule = rule_from(cfg, 0.5 * f.step);
  const BumpFunction bump;
  LowFrequencyParts parts{GridFunction1D(f.grid()), GridFunction1D(f.grid())};
  parallel_points(f.size(), [&](std::size_t i) {
    const double x = f.x(i);
    const double ux = u(x);
    const auto n = frequency_index(std::abs(ux), curve, 0);
    if (!n) {
      parts.t2.values[i] = modulated_integral(f, s, x, 0.0, curve, cfg.epsilon, cfg.radius,
                                              [](double) { return 1.0; }, rule);
      return;
    }
    const int top = *n - 1;
    auto win = [&](double t) { return bump.low_sum(top, t); };
    const double tmax = std::min(cfg.radius, std::ldexp(1.0, *n));
    const cplx full = modulated_integral(f, s, x, ux, curve, cfg.epsilon, tmax, win, rule);
    const cplx plain = modulated_integral(f, s, x, 0.0, curve, cfg.epsilon, tmax, win, rule);
    parts.t1.values[i] = full - plain;
    parts.t2.values[i] = plain;
  });
  return parts;
}

namespace {

// int over t of [F(x1-t, x2-u gamma(t)) - F(x1+t, x2-u gamma(-t))] win(t)/t
template <class Window>
cplx curve_integral_2d(const GridFunction2D& f, const Support& s, double x1, double x2, double u,
                       const Curve& curve, double tmin, double tmax, Window&& win,
                       const PanelRule& rule) {
  Interval rs[2];
  const int nr = t_ranges(s, x1, tmin, tmax, rs);
  cplx total = 0;
  for (int r = 0; r < nr; ++r) {
    auto amp = [&](double t) {
      const double shift_minus = u == 0.0 ? 0.0 : u * curve(t, 0);
      const double shift_plus = u == 0.0 ? 0.0 : u * curve(-t, 0);
      return (f.at(x1 - t, x2 - shift_minus) - f.at(x1 + t, x2 - shift_plus)) * (win(t) / t);
    };
    auto width = [&](double t) {
      double w = std::min(std::max(rule.min_width, rule.growth * t), rule.max_width);
      if (u != 0.0) {
        const double speed = std::abs(u * curve(t, 1));
        if (speed > 0) w = std::min(w, 0.5 * f.step2 / speed);
      }
      return std::max(w, 1e-12 * (1.0 + t));
    };
    cplx a0 = amp(rs[r].lo);
    march(rs[r].lo, rs[r].hi, width, [&](double t0, double t1) {
      const double mid = 0.5 * (t0 + t1);
      const cplx am = amp(mid), a1 = amp(t1);
      total += (t1 - t0) / 6.0 * (a0 + 4.0 * am + a1);
      a0 = a1;
    });
  }
  return total;
}

double max_shift(const ModulationField& u, double x1_lo, double x1_hi, const Curve& curve,
                 double radius) {
  const double umax = u.max_abs(x1_lo, x1_hi);
  if (umax == 0) return 0;
  return umax * std::max(std::abs(curve(radius, 0)), std::abs(curve(-radius, 0)));
}

}  // namespace

GridFunction2D hilbert_variable_apply(const GridFunction2D& f, const ModulationField& u,
                                      const Curve& curve, const PVConfig& cfg) {
  cfg.validate();
  const Support s = support_rows(f);
  const double lo1 = f.x1(0), hi1 = f.x1(f.n1 - 1);
  const double reach = s.empty ? 0.0 : std::min(cfg.radius, std::max(hi1 - s.lo, s.hi - lo1));
  check_coverage_2d(f, lo1 - cfg.radius, hi1 + cfg.radius, max_shift(u, lo1, hi1, curve, reach));
  const PanelRule rule{cfg.substep, cfg.growth, 0.5 * f.step1, cfg.phase_tolerance};
  GridFunction2D g = f.same_shape();
  parallel_points(f.n1, [&](std::size_t i) {
    const double x1 = f.x1(i);
    const double ux = u(x1);
    for (std::size_t j = 0; j < f.n2; ++j) {
      g(i, j) = curve_integral_2d(f, s, x1, f.x2(j), ux, curve, cfg.epsilon, cfg.radius,
                                  [](double) { return 1.0; }, rule);
    }
  });
  return g;
}

GridFunction2D directional_hilbert_apply(const GridFunction2D& f, double lambda,
                                         const Curve& curve, const PVConfig& cfg) {
  return hilbert_variable_apply(f, ModulationField::constant(lambda), curve, cfg);
}

cplx annulus_piece_at(const GridFunction2D& f, double x1, double x2, double u, const Curve& curve,
                      int k, int l, const BumpFunction& bump) {
  if (k < 0) throw std::invalid_argument("annulus piece needs k >= 0");
  const auto n = frequency_index(std::abs(u), curve, l);
  if (!n) return 0.0;
  const int j = k + *n;
  const Support s = support_rows(f);
  return curve_integral_2d(f, s, x1, x2, u, curve, std::ldexp(0.5, j), std::ldexp(2.0, j),
                           [&](double t) { return bump.dilate(j, t); },
                           annulus_rule(j, 0.5 * f.step1));
}

GridFunction2D annulus_piece_apply(const GridFunction2D& f, const ModulationField& u,
                                   const Curve& curve, int k, int l, const BumpFunction& bump) {
  if (k < 0) throw std::invalid_argument("annulus piece needs k >= 0");
  std::vector<int> level(f.n1, std::numeric_limits<int>::min());
  double reach = 0, shift = 0;
  for (std::size_t i = 0; i < f.n1; ++i) {
    const double ux = u(f.x1(i));
    const auto n = frequency_index(std::abs(ux), curve, l);
    if (n) {
      level[i] = k + *n;
      const double r = std::ldexp(2.0, level[i]);
      reach = std::max(reach, r);
      shift = std::max(shift, std::abs(ux) * std::max(std::abs(curve(r, 0)), std::abs(curve(-r, 0))));
    }
  }
  check_coverage_2d(f, f.x1(0) - reach, f.x1(f.n1 - 1) + reach, shift);
  const Support s = support_rows(f);
  GridFunction2D g = f.same_shape();
  parallel_points(f.n1, [&](std::size_t i) {
    if (level[i] == std::numeric_limits<int>::min()) return;
    const int j = level[i];
    const double x1 = f.x1(i);
    const double ux = u(x1);
    const PanelRule rule = annulus_rule(j, 0.5 * f.step1);
    for (std::size_t jj = 0; jj < f.n2; ++jj) {
      g(i, jj) = curve_integral_2d(f, s, x1, f.x2(jj), ux, curve, std::ldexp(0.5, j),
                                   std::ldexp(2.0, j), [&](double t) { return bump.dilate(j, t); },
                                   rule);
    }
  });
  return g;
}

// ---- maximal operators ----

std::vector<double> cumulative_trapezoid(const std::vector<double>& abs_values, double step) {
  std::vector<double> c(abs_values.size(), 0.0);
  for (std::size_t i = 1; i < abs_values.size(); ++i) {
    c[i] = c[i - 1] + 0.5 * step * (abs_values[i - 1] + abs_values[i]);
  }
  return c;
}

namespace {

// Integral of the interpolated |f| from the first sample to position p (in samples).
double cumulative_at(const std::vector<double>& a, const std::vector<double>& c, double step,
                     double p) {
  if (p <= 0) return 0.0;
  const double top = static_cast<double>(c.size() - 1);
  if (p >= top) return c.back();
  const auto k = static_cast<std::size_t>(p);
  const double s = p - static_cast<double>(k);
  if (s == 0.0) return c[k];
  return c[k] + step * s * (a[k] + 0.5 * s * (a[k + 1] - a[k]));
}

std::vector<double> abs_of(const GridFunction1D& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f.values[i]);
  return a;
}

// Average over the shifted set of [a, a + len] (positions in samples), given the
// cumulative integral C(p) of |f| from sample 0 to position p.
template <class Cumulative>
double shifted_average(Cumulative&& cum, double step, double a, long long len, double sigma) {
  const double L = static_cast<double>(len);
  const double d = sigma * L;
  double integral;
  if (2.0 * d < L) {
    integral = cum(a + L + d) - cum(a - d);
  } else {
    integral = (cum(a + L - d) - cum(a - d)) + (cum(a + L + d) - cum(a + d));
  }
  return integral / (L * step);
}

double shifted_average(const std::vector<double>& av, const std::vector<double>& c, double step,
                       double a, long long len, double sigma) {
  return shifted_average([&](double p) { return cumulative_at(av, c, step, p); }, step, a, len,
                         sigma);
}

template <class Cumulative>
double shifted_maximal_core(Cumulative&& cum, double value, long long n, double step,
                            std::size_t ii, double sigma, const IntervalFamily& family) {
  const auto i = static_cast<long long>(ii);
  double best = value;
  if (family.centered) {
    for (long long r = 1; r <= n; r *= 2) {
      best = std::max(best, shifted_average(cum, step, static_cast<double>(i - r), 2 * r, sigma));
    }
    return best;
  }
  const long long len_cap = std::max<long long>(2 * n, 1);
  for (long long len = 1; len <= len_cap; len *= 2) {
    const long long q = family.density <= 0 ? 1 : std::max<long long>(1, len / family.density);
    // Lattice points a = q * m with a <= i <= a + len.
    long long a = ((i - len) >= 0 ? (i - len + q - 1) / q : -((len - i) / q)) * q;
    for (; a <= i; a += q) {
      if (a + len < i) continue;
      best = std::max(best, shifted_average(cum, step, static_cast<double>(a), len, sigma));
    }
  }
  return best;
}

}  // namespace

GridFunction1D hl_maximal(const GridFunction1D& f) {
  const auto av = abs_of(f);
  const auto c = cumulative_trapezoid(av, f.step);
  const auto n = static_cast<long long>(f.size());
  GridFunction1D g(f.grid());
  parallel_points(f.size(), [&](std::size_t ii) {
    const auto i = static_cast<long long>(ii);
    double best = av[ii];
    for (long long r = 1; r <= n; r *= 2) {
      best = std::max(best, shifted_average(av, c, f.step, static_cast<double>(i - r), 2 * r, 0.0));
    }
    g.values[ii] = best;
  });
  return g;
}

double shifted_maximal_at(const std::vector<double>& av, const std::vector<double>& c,
                          double step, std::size_t ii, double sigma,
                          const IntervalFamily& family) {
  return shifted_maximal_core([&](double p) { return cumulative_at(av, c, step, p); }, av[ii],
                              static_cast<long long>(av.size()), step, ii, sigma, family);
}

PeriodicRow::PeriodicRow(std::vector<double> abs_values, double step_)
    : values(std::move(abs_values)), step(step_) {
  std::vector<double> ext = values;
  ext.push_back(values.front());
  cumulative = cumulative_trapezoid(ext, step);
}

double PeriodicRow::cumulative_at(double p) const {
  const double n = static_cast<double>(values.size());
  const double q = std::floor(p / n);
  const double r = p - q * n;
  const auto k = std::min(static_cast<std::size_t>(r), values.size() - 1);
  const double s = r - static_cast<double>(k);
  const double next = values[(k + 1) % values.size()];
  return q * cumulative.back() + cumulative[k] + step * s * (values[k] + 0.5 * s * (next - values[k]));
}

double PeriodicRow::shifted_maximal_at(std::size_t i, double sigma, const IntervalFamily& family) const {
  return shifted_maximal_core([&](double p) { return cumulative_at(p); }, values[i],
                              static_cast<long long>(values.size()), step, i, sigma, family);
}

GridFunction1D shifted_maximal(const GridFunction1D& f, double sigma, const IntervalFamily& family) {
  if (!(sigma >= 0)) throw std::invalid_argument("shifted maximal needs sigma >= 0");
  const auto av = abs_of(f);
  const auto c = cumulative_trapezoid(av, f.step);
  GridFunction1D g(f.grid());
  parallel_points(f.size(), [&](std::size_t i) {
    g.values[i] = shifted_maximal_at(av, c, f.step, i, sigma, family);
  });
  return g;
}

GridFunction1D maximal_truncated_hilbert(const GridFunction1D& f, const PVConfig& cfg) {
  cfg.validate();
  check_coverage_1d(f, f.origin - cfg.radius, f.last() + cfg.radius);
  const Support s = support_1d(f);
  const PanelRule rule = rule_from(cfg, 0.5 * f.step);
  const Curve flat("flat", Parity::even, [](double, int) { return 0.0; });
  std::vector<double> marks{cfg.epsilon};
  while (marks.back() * 2 < cfg.radius) marks.push_back(marks.back() * 2);
  marks.push_back(cfg.radius);
  GridFunction1D g(f.grid());
  parallel_points(f.size(), [&](std::size_t i) {
    const double x = f.x(i);
    std::vector<cplx> cum(marks.size(), 0.0);
    for (std::size_t j = 1; j < marks.size(); ++j) {
      cum[j] = cum[j - 1] + modulated_integral(f, s, x, 0.0, flat, marks[j - 1], marks[j],
                                               [](double) { return 1.0; }, rule);
    }
    double best = 0;
    for (std::size_t a = 0; a < cum.size(); ++a) {
      for (std::size_t b = a + 1; b < cum.size(); ++b) best = std::max(best, std::abs(cum[b] - cum[a]));
    }
    g.values[i] = best;
  });
  return g;
}

// ---- serial references ----

namespace reference {

GridFunction1D carleson_apply(const GridFunction1D& f, const ModulationField& u,
                              const Curve& curve, const PVConfig& cfg) {
  cfg.validate();
  const Support s = support_1d(f);
  GridFunction1D g(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.x(i);
    const double ux = u(x);
    Interval rs[2];
    const int nr = t_ranges(s, x, cfg.epsilon, cfg.radius, rs);
    cplx total = 0;
    for (int r = 0; r < nr; ++r) {
      const double speed = std::abs(ux) * std::abs(curve(rs[r].hi, 1));
      const double h = std::min({cfg.substep, 0.25 * f.step, 1.0 / (8.0 * (1.0 + speed))});
      const auto n = static_cast<long long>(std::ceil((rs[r].hi - rs[r].lo) / h));
      total += simpson(
          [&](double t) {
            const double gp = ux * curve(t, 0), gm = ux * curve(-t, 0);
            return (std::polar(1.0, gp) * f.at(x - t) - std::polar(1.0, gm) * f.at(x + t)) / t;
          },
          rs[r].lo, rs[r].hi, std::max<long long>(n, 2));
    }
    g.values[i] = total;
  }
  return g;
}

GridFunction2D hilbert_variable_apply(const GridFunction2D& f, const ModulationField& u,
                                      const Curve& curve, const PVConfig& cfg) {
  cfg.validate();
  const Support s = support_rows(f);
  GridFunction2D g = f.same_shape();
  for (std::size_t i = 0; i < f.n1; ++i) {
    const double x1 = f.x1(i);
    const double ux = u(x1);
    Interval rs[2];
    const int nr = t_ranges(s, x1, cfg.epsilon, cfg.radius, rs);
    for (std::size_t j = 0; j < f.n2; ++j) {
      const double x2 = f.x2(j);
      cplx total = 0;
      for (int r = 0; r < nr; ++r) {
        const double speed = std::abs(ux) * std::abs(curve(rs[r].hi, 1));
        const double h = std::min({cfg.substep, 0.25 * f.step1, 0.25 * f.step2 / (1.0 + speed)});
        const auto n = static_cast<long long>(std::ceil((rs[r].hi - rs[r].lo) / h));
        total += simpson(
            [&](double t) {
              return (f.at(x1 - t, x2 - ux * curve(t, 0)) - f.at(x1 + t, x2 - ux * curve(-t, 0))) / t;
            },
            rs[r].lo, rs[r].hi, std::max<long long>(n, 2));
      }
      g(i, j) = total;
    }
  }
  return g;
}

namespace {

// Exact integral of the piecewise-linear |f| over [p, q] (positions in samples).
double direct_integral(const std::vector<double>& av, double step, double p, double q) {
  const double top = static_cast<double>(av.size() - 1);
  p = std::clamp(p, 0.0, top);
  q = std::clamp(q, 0.0, top);
  if (q <= p) return 0.0;
  double total = 0;
  for (std::size_t k = static_cast<std::size_t>(p); k + 1 < av.size() && static_cast<double>(k) < q; ++k) {
    const double lo = std::max(p, static_cast<double>(k)) - static_cast<double>(k);
    const double hi = std::min(q, static_cast<double>(k + 1)) - static_cast<double>(k);
    if (hi <= lo) continue;
    const double slope = av[k + 1] - av[k];
    total += step * ((hi - lo) * av[k] + 0.5 * slope * (hi * hi - lo * lo));
  }
  return total;
}

double direct_shifted_average(const std::vector<double>& av, double step, double a, long long len,
                              double sigma) {
  const double L = static_cast<double>(len);
  const double d = sigma * L;
  const double l0 = a - d, l1 = a + L - d, r0 = a + d, r1 = a + L + d;
  double integral;
  if (r0 <= l1) {
    integral = direct_integral(av, step, l0, r1);
  } else {
    integral = direct_integral(av, step, l0, l1) + direct_integral(av, step, r0, r1);
  }
  return integral / (L * step);
}

}  // namespace

GridFunction1D hl_maximal(const GridFunction1D& f) {
  const auto av = abs_of(f);
  const auto n = static_cast<long long>(f.size());
  GridFunction1D g(f.grid());
  for (long long i = 0; i < n; ++i) {
    double best = av[static_cast<std::size_t>(i)];
    for (long long r = 1; r <= n; r *= 2) {
      best = std::max(best, direct_shifted_average(av, f.step, static_cast<double>(i - r), 2 * r, 0.0));
    }
    g.values[static_cast<std::size_t>(i)] = best;
  }
  return g;
}

GridFunction1D shifted_maximal(const GridFunction1D& f, double sigma, const IntervalFamily& family) {
  if (!(sigma >= 0)) throw std::invalid_argument("shifted maximal needs sigma >= 0");
  const auto av = abs_of(f);
  const auto n = static_cast<long long>(f.size());
  GridFunction1D g(f.grid());
  for (long long i = 0; i < n; ++i) {
    double best = av[static_cast<std::size_t>(i)];
    if (family.centered) {
      for (long long r = 1; r <= n; r *= 2) {
        best = std::max(best, direct_shifted_average(av, f.step, static_cast<double>(i - r), 2 * r, sigma));
      }
    } else {
      for (long long len = 1; len <= 2 * n; len *= 2) {
        const long long q = family.density <= 0 ? 1 : std::max<long long>(1, len / family.density);
        for (long long a = i - len; a <= i; ++a) {
          if (((a % q) + q) % q != 0) continue;
          best = std::max(best, direct_shifted_average(av, f.step, static_cast<double>(a), len, sigma));
        }
      }
    }
    g.values[static_cast<std::size_t>(i)] = best;
  }
  return g;
}

}  // namespace reference

}  // namespace curveflow
