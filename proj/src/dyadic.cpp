#include "curveflow/dyadic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace curveflow {

namespace {

double g_mollifier(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double smooth_step(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double a = g_mollifier(2.0 - s);
  const double b = g_mollifier(s - 1.0);
  return a / (a + b);
}

double BumpFunction::operator()(double t) const {
  const double a = std::abs(t);
  return smooth_step(a) - smooth_step(2.0 * a);
}

double BumpFunction::dilate(int l, double t) const { return (*this)(std::ldexp(t, -l)); }

double BumpFunction::low_sum(int top, double t) const {
  return smooth_step(std::ldexp(std::abs(t), -top));
}

BumpFunction make_bump() { return {}; }

double FrequencyCutoff::operator()(double xi) const {
  const double a = std::abs(xi);
  return smooth_step(0.5 * a) - smooth_step(4.0 * a);
}

double FrequencyCutoff::dilate(int l, double xi) const { return (*this)(std::ldexp(xi, -l)); }

int max_resolvable_level(double step2) {
  const double nyquist = std::numbers::pi / step2;
  int l = static_cast<int>(std::floor(std::log2(nyquist))) - 2;
  while (std::ldexp(1.0, l + 2) >= nyquist) --l;
  while (std::ldexp(1.0, l + 3) < nyquist) ++l;
  return l;
}

namespace {

void check_level(const GridFunction2D& f, int l) {
  const int top = max_resolvable_level(f.step2);
  if (l > top) {
    throw std::invalid_argument("projection level " + std::to_string(l) +
                                " not resolvable; admissible levels are l <= " +
                                std::to_string(top));
  }
}

// Angular frequency of discrete bin j.
double bin_frequency(std::size_t j, std::size_t n, double step) {
  const auto jj = static_cast<long long>(j);
  const auto nn = static_cast<long long>(n);
  const long long k = (2 * jj <= nn) ? jj : jj - nn;
  return 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * step);
}

std::vector<double> multiplier(const GridFunction2D& f, int l, Projection which) {
  std::vector<double> m(f.n2);
  const BumpFunction psi;
  const FrequencyCutoff rho;
  for (std::size_t j = 0; j < f.n2; ++j) {
    const double xi = bin_frequency(j, f.n2, f.step2);
    m[j] = which == Projection::P ? psi.dilate(l, xi) : rho.dilate(l, xi);
  }
  return m;
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

GridFunction2D project(const GridFunction2D& f, int l, Projection which) {
  check_level(f, l);
  const auto m = multiplier(f, l, which);
  GridFunction2D out = f;
  const int n = static_cast<int>(f.n2);
  const int howmany = static_cast<int>(f.n1);
  auto* data = reinterpret_cast<fftw_complex*>(out.values.data());
  fftw_plan fwd, bwd;
  {
    // Planner calls are not thread-safe; execution is.
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_many_dft(1, &n, howmany, data, nullptr, 1, n, data, nullptr, 1, n,
                             FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_many_dft(1, &n, howmany, data, nullptr, 1, n, data, nullptr, 1, n,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  const double scale = 1.0 / static_cast<double>(n);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(f.n1); ++i) {
    cplx* row = out.values.data() + static_cast<std::size_t>(i) * f.n2;
    for (std::size_t j = 0; j < f.n2; ++j) row[j] *= m[j] * scale;
  }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  return out;
}

namespace reference {

GridFunction2D project(const GridFunction2D& f, int l, Projection which) {
  check_level(f, l);
  const auto m = multiplier(f, l, which);
  GridFunction2D out = f;
  const std::size_t n = f.n2;
  std::vector<cplx> spec(n);
  for (std::size_t i = 0; i < f.n1; ++i) {
    const cplx* row = f.values.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      cplx acc = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) /
                           static_cast<double>(n);
        acc += row[j] * cplx(std::cos(ang), std::sin(ang));
      }
      spec[k] = acc * m[k];
    }
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) /
                           static_cast<double>(n);
        acc += spec[k] * cplx(std::cos(ang), std::sin(ang));
      }
      out(i, j) = acc / static_cast<double>(n);
    }
  }
  return out;
}

}  // namespace reference

std::optional<int> frequency_index(double u_abs, const Curve& curve, int l) {
  if (u_abs < 0 || std::isnan(u_abs)) {
    throw std::invalid_argument("frequency_index expects |u| >= 0");
  }
  if (u_abs == 0) return std::nullopt;
  const double target = std::ldexp(1.0 / u_abs, -l);
  constexpr int n_min = -1074, n_max = 1023;
  auto ok = [&](int n) { return curve.half_line(std::ldexp(1.0, n), 0) <= target; };

  int lo, hi;  // ok(lo) and !ok(hi)
  if (ok(0)) {
    lo = 0;
    hi = 1;
    while (ok(hi)) {
      lo = hi;
      if (hi == n_max) return n_max;
      hi = std::min(2 * hi, n_max);
    }
  } else {
    hi = 0;
    lo = -1;
    while (!ok(lo)) {
      hi = lo;
      if (lo == n_min) {
        throw std::range_error("frequency_index: gamma(2^n) exceeds the target for all n");
      }
      lo = std::max(2 * lo, n_min);
    }
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace curveflow
