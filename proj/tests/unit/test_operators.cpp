#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "curveflow/errors.hpp"
#include "curveflow/operators.hpp"
#include "curveflow/quadrature.hpp"
#include "helpers.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace curveflow;
using testutil::indicator;
using testutil::max_diff;
using testutil::sample;

namespace {

const Curve kSquare = builtin_curve("power", 2.0);

GridFunction2D separable(double lo1, double h1, std::size_t n1, std::size_t n2,
                         const std::function<double(double)>& a, const std::function<double(double)>& g) {
  GridFunction2D f(lo1, h1, n1, 0.0, 0.1, n2, X2Boundary::periodic);
  for (std::size_t i = 0; i < f.n1; ++i)
    for (std::size_t j = 0; j < f.n2; ++j) f(i, j) = a(f.x1(i)) * g(f.x2(j));
  return f;
}

double g_row(double x2) { return 1.0 + 0.5 * std::cos(2 * M_PI * x2 / 3.2); }

// Centered averages of the interpolated |f| over every integer radius (in samples).
double brute_centered_max(const GridFunction1D& f, std::size_t i) {
  double best = std::abs(f.values[i]);
  const long long n = static_cast<long long>(f.size());
  for (long long r = 1; r <= n; ++r) {
    const long long a = static_cast<long long>(i) - r, b = static_cast<long long>(i) + r;
    double s = 0;
    for (long long k = a; k < b; ++k) {
      const double lo = (k >= 0 && k < n) ? std::abs(f.values[static_cast<std::size_t>(k)]) : 0.0;
      const double hi = (k + 1 >= 0 && k + 1 < n) ? std::abs(f.values[static_cast<std::size_t>(k + 1)]) : 0.0;
      s += 0.5 * f.step * (lo + hi);
    }
    best = std::max(best, s / (2.0 * static_cast<double>(r) * f.step));
  }
  return best;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("pv config validation") {
  PVConfig c;
  CHECK_NOTHROW(c.validate());
  c.substep = 2 * c.epsilon;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = PVConfig{};
  c.radius = c.epsilon / 2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("shifted interval pieces") {
  const ShiftedInterval I{1.0, 3.0, 0.75};
  CHECK(I.left_piece().first == -0.5);
  CHECK(I.left_piece().second == 1.5);
  CHECK(I.right_piece().first == 2.5);
  CHECK(I.right_piece().second == 4.5);
}

TEST_CASE("unmodulated carleson operator against the antiderivative") {
  const auto f = indicator(-1, 1, -4, 1.0 / 64, 513);
  const PVConfig cfg;
  const cplx v = carleson_at(f, 2.0, 0.0, kSquare, cfg);
  CHECK(std::abs(v - std::log(3.0)) < 1e-2);
  CHECK(std::abs(v.imag()) < 1e-12);
  CHECK(std::abs(carleson_at(f, 0.0, 0.0, kSquare, cfg)) < 1e-6);
  for (double x : {1.5, 2.5, 3.5}) {
    CHECK(std::abs(carleson_at(f, x, 0.0, kSquare, cfg) - std::log((x + 1) / (x - 1))) < 1e-2);
  }
}

TEST_CASE("empty support gives exact zero") {
  auto f = indicator(-1, 1, -4, 1.0 / 32, 257);
  PVConfig cfg;
  cfg.radius = 1.0;
  CHECK(carleson_at(f, 3.5, 7.0, kSquare, cfg) == cplx(0.0));
  const auto zero = sample(-4, 1.0 / 32, 257, [](double) { return cplx(0.0); });
  const auto g = carleson_apply(zero, ModulationField::constant(3.0), kSquare, PVConfig{});
  for (const auto& v : g.values) CHECK(v == cplx(0.0));
}

TEST_CASE("coverage is enforced when the data reaches the grid edge") {
  const auto f = sample(-1, 1.0 / 16, 33, [](double) { return cplx(1.0); });
  CHECK_THROWS_AS(carleson_apply(f, ModulationField::constant(1.0), kSquare, PVConfig{}), CoverageError);
}

TEST_CASE("carleson operator is linear") {
  const auto f = sample(-6, 1.0 / 32, 385, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  const auto g = sample(-6, 1.0 / 32, 385, [](double x) { return cplx(0.0, x * std::exp(-2 * x * x)); });
  auto fg = f;
  for (std::size_t i = 0; i < fg.size(); ++i) fg.values[i] = 2.0 * f.values[i] - cplx(0, 3) * g.values[i];
  const auto u = ModulationField::piecewise({-1.0, 2.0}, {0.5, -30.0, 4.0});
  const PVConfig cfg;
  const auto a = carleson_apply(f, u, kSquare, cfg);
  const auto b = carleson_apply(g, u, kSquare, cfg);
  const auto c = carleson_apply(fg, u, kSquare, cfg);
  double d = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    d = std::max(d, std::abs(c.values[i] - (2.0 * a.values[i] - cplx(0, 3) * b.values[i])));
  CHECK(d < 1e-10);
}

TEST_CASE("carleson parallel kernel matches the serial reference") {
  const auto f = sample(-4, 1.0 / 16, 129, [](double x) { return cplx(std::exp(-3 * x * x) * std::cos(3 * x), 0.0); });
  const auto u = ModulationField::piecewise({-1.0, 0.5}, {2.0, -0.01, 500.0});
  const PVConfig cfg;
  const auto a = carleson_apply(f, u, kSquare, cfg);
  const auto b = reference::carleson_apply(f, u, kSquare, cfg);
  // Panels span up to half a grid cell of the piecewise-linear interpolant.
  CHECK(max_diff(a.values, b.values) < 2e-4);
}

TEST_CASE("variable hilbert transform: row oracle and parity") {
  PVConfig cfg;
  const auto a = [](double x1) { return (std::abs(x1) < 1 - 1e-12) ? 1.0 : (std::abs(std::abs(x1) - 1) < 1e-12 ? 0.5 : 0.0); };
  const auto f = separable(-4, 1.0 / 16, 129, 32, a, g_row);
  const auto h = hilbert_variable_apply(f, ModulationField::constant(0.0), kSquare, cfg);
  const std::size_t i2 = 96;  // x1 = 2
  CHECK(f.x1(i2) == doctest::Approx(2.0));
  for (std::size_t j = 0; j < f.n2; ++j) {
    CHECK(std::abs(h(i2, j) - std::log(3.0) * g_row(f.x2(j))) < 1e-2 * g_row(f.x2(j)));
  }

  // Constant in x1 near the evaluation points: odd integrand cancels.
  PVConfig near;
  near.radius = 1.0;
  const auto w = [](double x1) {
    const double r = std::abs(x1);
    return r <= 3 ? 1.0 : (r >= 4 ? 0.0 : 4 - r);
  };
  const auto fc = separable(-5, 1.0 / 16, 161, 32, w, g_row);
  const auto hc = hilbert_variable_apply(fc, ModulationField::constant(0.7), kSquare, near);
  for (std::size_t i = 0; i < fc.n1; ++i) {
    if (std::abs(fc.x1(i)) > 1.5) continue;
    for (std::size_t j = 0; j < fc.n2; ++j) CHECK(std::abs(hc(i, j)) < 1e-8);
  }

  const GridFunction2D zero = f.same_shape();
  const auto hz = hilbert_variable_apply(zero, ModulationField::piecewise({0.0}, {1.0, -2.0}), kSquare, cfg);
  for (const auto& v : hz.values) CHECK(v == cplx(0.0));
}

TEST_CASE("variable hilbert transform matches the serial reference") {
  const auto f = separable(-3, 1.0 / 8, 49, 16, [](double x) { return std::exp(-5 * x * x); }, g_row);
  const auto u = ModulationField::piecewise({0.0}, {0.3, -2.0});
  const PVConfig cfg;
  const auto a = hilbert_variable_apply(f, u, kSquare, cfg);
  const auto b = reference::hilbert_variable_apply(f, u, kSquare, cfg);
  CHECK(max_diff(a.values, b.values) < 2e-3);
}

TEST_CASE("directional transform") {
  const auto f = separable(-3, 1.0 / 8, 49, 16, [](double x) { return std::exp(-5 * x * x); }, g_row);
  const PVConfig cfg;
  const auto d0 = directional_hilbert_apply(f, 0.0, kSquare, cfg);
  const auto h0 = hilbert_variable_apply(f, ModulationField::constant(0.0), kSquare, cfg);
  CHECK(d0.values == h0.values);
  const auto d2 = directional_hilbert_apply(f, 2.0, kSquare, cfg);
  const auto s2 = hilbert_variable_apply(f, ModulationField::constant(1.0), scaled_curve(kSquare, 2.0), cfg);
  CHECK(max_diff(d2.values, s2.values) < 1e-8);
}

TEST_CASE("truncated piece: parity, support and fine-step oracle") {
  const BumpFunction psi;
  const auto one = sample(-8, 1.0 / 32, 513, [](double) { return cplx(1.0); });
  const auto s = truncated_piece_apply(one, ModulationField::constant(1.0), kSquare, 0, psi, Grid1D{-2, 0.25, 17});
  for (const auto& v : s.values) CHECK(std::abs(v) < 1e-6);

  const auto bump = sample(-4, 1.0 / 64, 513, [](double x) { return cplx(std::exp(-16 * x * x), 0.0); });
  const auto far = sample(-4, 1.0 / 64, 513, [](double x) { return std::abs(x) < 0.2 ? cplx(1.0) : cplx(0.0); });
  CHECK(truncated_piece_at(far, 0.0, 1.0, kSquare, 0, psi) == cplx(0.0));

  const double x = 1.0;
  const cplx got = truncated_piece_at(bump, x, 1.0, kSquare, 0, psi);
  auto integrand = [&](double t) { return std::exp(cplx(0, kSquare(t))) * bump.at(x - t) * psi.dilate(0, t) / t; };
  const cplx oracle = simpson(integrand, -2.0, -0.5, 300000) + simpson(integrand, 0.5, 2.0, 300000);
  CHECK(std::abs(got - oracle) < 1e-4);
  CHECK(std::abs(got) > 1e-3);
}

TEST_CASE("annulus piece: zero cases and fine-step oracle") {
  const BumpFunction psi;
  const auto f = separable(-6, 1.0 / 16, 193, 64, [](double x) { return std::exp(-x * x); },
                           [](double x2) { return std::cos(2 * M_PI * x2 / 3.2) + 0.3 * std::sin(2 * M_PI * 3 * x2 / 6.4); });
  const auto pf = project(f, 0, Projection::P);
  CHECK(annulus_piece_at(pf, 0.5, 0.3, 0.0, kSquare, 1, 0, psi) == cplx(0.0));
  CHECK(annulus_piece_at(f.same_shape(), 0.5, 0.3, 1.0, kSquare, 1, 0, psi) == cplx(0.0));

  const double x1 = 0.5, x2 = 0.3;
  const cplx got = annulus_piece_at(pf, x1, x2, 1.0, kSquare, 1, 0, psi);
  const int j = 1 + *frequency_index(1.0, kSquare, 0);
  auto integrand = [&](double t) { return pf.at(x1 - t, x2 - kSquare(t)) * psi.dilate(j, t) / t; };
  const double lo = std::ldexp(0.5, j), hi = std::ldexp(2.0, j);
  const cplx oracle = simpson(integrand, -hi, -lo, 400000) + simpson(integrand, lo, hi, 400000);
  CHECK(std::abs(got - oracle) < 1e-4);
}

TEST_CASE("hardy-littlewood maximal function") {
  const auto f = indicator(0, 1, -4, 1.0 / 32, 257);
  const auto m = hl_maximal(f);
  const std::size_t half = 144, two = 192;  // x = 0.5, x = 2
  CHECK(f.x(half) == doctest::Approx(0.5));
  CHECK(f.x(two) == doctest::Approx(2.0));
  CHECK(m.values[half].real() == doctest::Approx(1.0));
  const double brute = brute_centered_max(f, two);
  CHECK(std::abs(brute - 0.25) < 5 * f.step);
  CHECK(std::abs(m.values[two].real() - 0.25) < 5 * f.step);
  CHECK(m.values[two].real() <= brute + 1e-12);

  const auto c = sample(-2, 0.1, 41, [](double) { return cplx(-2.5); });
  for (const auto& v : hl_maximal(c).values) CHECK(v.real() == doctest::Approx(2.5));

  const auto g = sample(-4, 1.0 / 16, 129, [](double x) { return cplx(std::exp(-x * x), std::sin(x)); });
  CHECK(max_diff(hl_maximal(g).values, reference::hl_maximal(g).values) < 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(hl_maximal(g).values[i].real() >= std::abs(g.values[i]));
}

TEST_CASE("maximal truncated hilbert transform") {
  const auto f = indicator(-1, 1, -4, 1.0 / 64, 513);
  const auto m = maximal_truncated_hilbert(f, PVConfig{});
  const std::size_t i = 384;  // x = 2
  CHECK(f.x(i) == doctest::Approx(2.0));
  CHECK(std::abs(m.values[i].real() - std::log(3.0)) < 1e-2);
  const auto zero = sample(-4, 1.0 / 16, 129, [](double) { return cplx(0.0); });
  for (const auto& v : maximal_truncated_hilbert(zero, PVConfig{}).values) CHECK(v == cplx(0.0));
}

TEST_CASE("shifted maximal function") {
  const auto f = indicator(10, 11, -12, 1.0 / 16, 385);
  const std::size_t z = 192;  // x = 0
  CHECK(f.x(z) == doctest::Approx(0.0));
  const IntervalFamily fam{4, false};
  const auto m = shifted_maximal(f, 10.0, fam);
  const auto r = reference::shifted_maximal(f, 10.0, fam);
  // I = [0, 1] lands on the support; the interpolated indicator loses h/2 of mass.
  CHECK(std::abs(m.values[z].real() - 1.0) <= f.step);
  CHECK(std::abs(r.values[z].real() - 1.0) <= f.step);
  CHECK(m.values[z].real() >= 1.0 - 0.5 * f.step - 1e-12);

  const auto g = sample(-3, 1.0 / 16, 97, [](double x) { return cplx(std::exp(-x * x) * (1 + x), 0.0); });
  for (double sigma : {0.0, 0.5, 3.0, 17.0}) {
    for (const IntervalFamily fm : {IntervalFamily{4, false}, IntervalFamily{0, false}, IntervalFamily{4, true}}) {
      CHECK(max_diff(shifted_maximal(g, sigma, fm).values, reference::shifted_maximal(g, sigma, fm).values) < 1e-12);
    }
  }
  CHECK(shifted_maximal(g, 0.0, IntervalFamily{4, true}).values == hl_maximal(g).values);

  const auto zero = sample(-3, 1.0 / 16, 97, [](double) { return cplx(0.0); });
  for (const auto& v : shifted_maximal(zero, 4.0).values) CHECK(v == cplx(0.0));
  CHECK_THROWS_AS(shifted_maximal(g, -1.0), std::invalid_argument);

  // A denser interval family can only increase the maximum.
  const auto coarse = shifted_maximal(g, 2.0, IntervalFamily{1, false});
  const auto fine = shifted_maximal(g, 2.0, IntervalFamily{0, false});
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(fine.values[i].real() >= coarse.values[i].real() - 1e-15);
}

TEST_CASE("periodic rows wrap shifted intervals") {
  std::vector<double> v(64, 0.0);
  for (std::size_t i = 0; i < 8; ++i) v[i] = 1.0;
  const PeriodicRow row(v, 0.5);
  CHECK(row.cumulative_at(64.0) == doctest::Approx(row.cumulative.back()));
  CHECK(row.cumulative_at(64.0 + 3.0) == doctest::Approx(row.cumulative.back() + row.cumulative_at(3.0)));
  CHECK(row.cumulative_at(-64.0) == doctest::Approx(-row.cumulative.back()));
  // The row equals its own translate by a full period.
  for (std::size_t i = 0; i < 64; i += 7) {
    CHECK(row.shifted_maximal_at(i, 0.0, IntervalFamily{4, true}) >= v[i]);
  }
}

TEST_CASE("low frequency split") {
  const auto f = sample(-6, 1.0 / 32, 385, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  const auto parts0 = low_frequency_parts(f, ModulationField::constant(0.0), kSquare, PVConfig{});
  const auto full0 = carleson_apply(f, ModulationField::constant(0.0), kSquare, PVConfig{});
  CHECK(max_diff(parts0.t2.values, full0.values) < 1e-12);
  for (const auto& v : parts0.t1.values) CHECK(v == cplx(0.0));
}

TEST_CASE("results do not depend on the thread count") {
#if defined(_OPENMP)
  const auto f = sample(-4, 1.0 / 16, 129, [](double x) { return cplx(std::exp(-x * x), 0.2 * x); });
  auto g = f;
  g.values.front() = g.values.back() = 0.0;
  const auto u = ModulationField::piecewise({0.0}, {3.0, -0.5});
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a1 = carleson_apply(g, u, kSquare, PVConfig{});
  const auto m1 = shifted_maximal(g, 3.0);
  omp_set_num_threads(4);
  const auto a4 = carleson_apply(g, u, kSquare, PVConfig{});
  const auto m4 = shifted_maximal(g, 3.0);
  omp_set_num_threads(saved);
  CHECK(a1.values == a4.values);
  CHECK(m1.values == m4.values);
#else
  CHECK(true);
#endif
}

}
