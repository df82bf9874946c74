#include "curveflow/curve.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace curveflow {

Curve::Curve(std::string label, Parity parity, HalfLineModel model, int closed_orders)
    : label_(std::move(label)), parity_(parity), model_(std::move(model)),
      closed_orders_(closed_orders) {
  if (closed_orders_ < 0 || closed_orders_ > 3) {
    throw std::invalid_argument("closed_orders must be in 0..3");
  }
}

double Curve::half_line(double t, int order) const {
  if (order <= closed_orders_) return model_(t, order);
  const double h = t * 1e-5;
  return (half_line(t + h, order - 1) - half_line(t - h, order - 1)) / (2.0 * h);
}

double Curve::operator()(double t, int order) const {
  if (order < 0 || order > 3) throw std::invalid_argument("curve order must be in 0..3");
  if (t == 0.0) {
    if (order <= 1) return 0.0;
    throw std::invalid_argument("curve derivative of order >= 2 is not defined at t = 0");
  }
  double v = half_line(std::abs(t), order);
  if (!std::isfinite(v)) {
    throw std::range_error("curve '" + label_ + "' overflows at t = " + std::to_string(t));
  }
  if (t < 0) {
    // odd curve: orders 0,2 odd; even curve: orders 1,3 odd
    const bool odd_function = (parity_ == Parity::odd) ? (order % 2 == 0) : (order % 2 == 1);
    if (odd_function) v = -v;
  }
  return v;
}

namespace {

double int_power_log_value(double t, double alpha) {
  // gamma(t) = t^(alpha+1) * int_0^1 v^alpha log(1 + t v) dv
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double v) { return std::pow(v, alpha) * std::log1p(t * v); };
  const double inner = integrator.integrate(integrand, 0.0, 1.0);
  return std::pow(t, alpha + 1.0) * inner;
}

}  // namespace

Curve builtin_curve(std::string_view family, std::optional<double> alpha) {
  if (family == "power" || family == "power_odd") {
    // alpha = 1 is admitted so the linear, inadmissible curve stays constructible.
    if (!alpha || !(*alpha >= 1.0)) {
      throw std::invalid_argument("power families need alpha >= 1");
    }
    const double a = *alpha;
    auto model = [a](double t, int order) -> double {
      switch (order) {
        case 0: return std::pow(t, a);
        case 1: return a * std::pow(t, a - 1.0);
        case 2: return a * (a - 1.0) * std::pow(t, a - 2.0);
        default: return a * (a - 1.0) * (a - 2.0) * std::pow(t, a - 3.0);
      }
    };
    const Parity parity = family == "power" ? Parity::even : Parity::odd;
    return Curve(std::string(family) + "(" + std::to_string(a) + ")", parity, model);
  }
  if (family == "t2log") {
    auto model = [](double t, int order) -> double {
      const double l = std::log1p(t);
      const double q = 1.0 + t;
      switch (order) {
        case 0: return t * t * l;
        case 1: return 2.0 * t * l + t * t / q;
        case 2: return 2.0 * l + 2.0 * t / q + t * (2.0 + t) / (q * q);
        default: return 2.0 / q + 2.0 / (q * q) + 2.0 / (q * q * q);
      }
    };
    return Curve("t2log", Parity::even, model);
  }
  if (family == "int_power_log") {
    if (!alpha || !(*alpha > 1.0)) throw std::invalid_argument("int_power_log needs alpha > 1");
    const double a = *alpha;
    auto model = [a](double t, int order) -> double {
      const double l = std::log1p(t);
      const double q = 1.0 + t;
      switch (order) {
        case 0: return int_power_log_value(t, a);
        case 1: return std::pow(t, a) * l;
        case 2: return a * std::pow(t, a - 1.0) * l + std::pow(t, a) / q;
        default:
          return a * (a - 1.0) * std::pow(t, a - 2.0) * l + 2.0 * a * std::pow(t, a - 1.0) / q -
                 std::pow(t, a) / (q * q);
      }
    };
    return Curve("int_power_log(" + std::to_string(a) + ")", Parity::even, model);
  }
  throw std::invalid_argument("unknown curve family '" + std::string(family) + "'");
}

Curve scaled_curve(const Curve& curve, double factor) {
  auto model = [curve, factor](double t, int order) { return factor * curve.half_line(t, order); };
  return Curve(std::to_string(factor) + "*" + curve.label(), curve.parity(), model,
               curve.closed_orders());
}

namespace {

bool non_increasing_within_tol(double prev, double next) {
  return next - prev <= 1e-9 * (1.0 + std::abs(prev));
}

double ratio_derivative(const Curve& c, double t) {
  // (gamma''/gamma')'
  if (c.closed_orders() >= 3) {
    const double d1 = c.half_line(t, 1), d2 = c.half_line(t, 2), d3 = c.half_line(t, 3);
    return (d3 * d1 - d2 * d2) / (d1 * d1);
  }
  const double h = t * 1e-5;
  auto g = [&](double s) { return c.half_line(s, 2) / c.half_line(s, 1); };
  return (g(t + h) - g(t - h)) / (2.0 * h);
}

}  // namespace

CurveReport check_conditions(const Curve& curve, const LogGrid& grid) {
  if (grid.per_octave < 4) {
    throw std::invalid_argument("condition grid needs at least 4 points per octave");
  }
  if (grid.log2_lo >= grid.log2_hi) throw std::invalid_argument("empty condition grid window");

  const int npts = (grid.log2_hi - grid.log2_lo) * grid.per_octave + 1;
  std::vector<double> ts(npts);
  for (int j = 0; j < npts; ++j) {
    ts[j] = std::exp2(grid.log2_lo + static_cast<double>(j) / grid.per_octave);
  }

  CurveReport rep;
  rep.label = curve.label();
  rep.grid = grid;
  const double inf = std::numeric_limits<double>::infinity();

  // (i) doubling ratio of gamma'
  {
    auto& v = rep.condition_i;
    v.pass = true;
    double c1 = -inf, prev = 0;
    for (int j = 0; j < npts; ++j) {
      const double r = curve(2.0 * ts[j], 1) / curve(ts[j], 1);
      if (!std::isfinite(r)) {
        v.pass = false;
        v.witness = ts[j];
        v.detail = "gamma'(2t)/gamma'(t) is not finite";
        break;
      }
      if (j > 0 && v.pass && !non_increasing_within_tol(prev, r)) {
        v.pass = false;
        v.witness = ts[j];
        v.detail = "gamma'(2t)/gamma'(t) increases";
      }
      c1 = std::max(c1, r);
      prev = r;
    }
    rep.constants.c1 = c1;
  }

  // (ii) t gamma''/gamma' bounded
  {
    auto& v = rep.condition_ii;
    v.pass = true;
    double c2 = -inf;
    for (double t : ts) {
      const double q = t * curve(t, 2) / curve(t, 1);
      if (!std::isfinite(q)) {
        v.pass = false;
        v.witness = t;
        v.detail = "t gamma''/gamma' is not finite";
        break;
      }
      c2 = std::max(c2, q);
    }
    rep.constants.c2 = c2;
  }

  // (iii) t^2 |(gamma''/gamma')'| bounded below
  {
    auto& v = rep.condition_iii;
    double c3 = inf, arg = ts.front();
    bool finite = true;
    for (double t : ts) {
      const double q = t * t * std::abs(ratio_derivative(curve, t));
      if (!std::isfinite(q)) {
        finite = false;
        arg = t;
        break;
      }
      if (q < c3) {
        c3 = q;
        arg = t;
      }
    }
    rep.constants.c3 = finite ? c3 : 0.0;
    v.pass = finite && c3 > 1e-9;
    if (!v.pass) {
      v.witness = arg;
      v.detail = finite ? "t^2 |(gamma''/gamma')'| has no positive lower bound"
                        : "t^2 |(gamma''/gamma')'| is not finite";
    }
  }

  // (iv) gamma'''/gamma'' constant or strictly monotone
  {
    auto& v = rep.condition_iv;
    std::vector<double> q(npts);
    v.pass = true;
    for (int j = 0; j < npts; ++j) {
      const double d2 = curve(ts[j], 2);
      if (d2 == 0.0) {
        v.pass = false;
        v.witness = ts[j];
        v.detail = "gamma'' vanishes, gamma'''/gamma'' undefined";
        break;
      }
      q[j] = curve(ts[j], 3) / d2;
    }
    rep.iv_kind = "none";
    if (v.pass) {
      const auto [mn, mx] = std::minmax_element(q.begin(), q.end());
      const double range = *mx - *mn;
      double tv = 0;
      for (int j = 1; j < npts; ++j) tv += std::abs(q[j] - q[j - 1]);
      if (tv < 1e-9 * (1.0 + range)) {
        rep.iv_kind = "constant";
      } else {
        int sign = 0;
        for (int j = 1; j < npts && v.pass; ++j) {
          const double d = q[j] - q[j - 1];
          const double tol = 1e-9 * std::max(std::abs(q[j]), std::abs(q[j - 1]));
          const int s = d > tol ? 1 : (d < -tol ? -1 : 0);
          if (s == 0 || (sign != 0 && s != sign)) {
            v.pass = false;
            v.witness = ts[j];
            v.detail = "gamma'''/gamma'' is neither constant nor strictly monotone";
          }
          if (sign == 0) sign = s;
        }
        if (v.pass) rep.iv_kind = sign > 0 ? "increasing" : "decreasing";
      }
    }
  }

  // c4 and the side hypotheses
  {
    double c4 = -inf;
    for (double t : ts) c4 = std::max(c4, t * curve(t, 1) / curve(t, 0));
    rep.constants.c4 = c4;

    const double t0 = ts.front();
    rep.origin.pass = std::abs(curve(t0, 0)) <= 1e-2 && std::abs(curve(t0, 1)) <= 1e-2;
    if (!rep.origin.pass) {
      rep.origin.witness = t0;
      rep.origin.detail = "gamma or gamma' not small at the left end of the grid";
    }
    rep.convexity.pass = true;
    for (double t : ts) {
      const double d2 = curve(t, 2);
      if (d2 < -1e-12 * (1.0 + std::abs(curve(t, 1)) / t)) {
        rep.convexity.pass = false;
        rep.convexity.witness = t;
        rep.convexity.detail = "gamma'' negative";
        break;
      }
    }
  }
  return rep;
}

}  // namespace curveflow
