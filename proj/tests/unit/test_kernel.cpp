#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "curveflow/errors.hpp"
#include "curveflow/harness.hpp"
#include "curveflow/kernel.hpp"
#include "curveflow/presets.hpp"
#include "curveflow/quadrature.hpp"
#include "curveflow/random.hpp"

using namespace curveflow;

namespace {
const Curve kSquare = builtin_curve("power", 2.0);
}

TEST_SUITE("kernel") {

TEST_CASE("phase ordering") {
  const PhaseParams p(2, 3, 1, 0.5, 2.0, 0.75, kSquare);
  CHECK(p.swapped);
  CHECK(p.n_x == 1);
  CHECK(p.n_z == 3);
  CHECK(p.u_x == 2.0);
  CHECK(p.h == 0.25);
  CHECK(p.s == doctest::Approx(-0.75 * 0.25));
  CHECK_THROWS_AS(PhaseParams(-1, 0, 0, 1, 1, 0, kSquare), std::invalid_argument);
}

TEST_CASE("phase vanishes without modulation") {
  const PhaseParams p(3, -1, 2, 0.0, 0.0, 1.3, kSquare);
  for (double t : {-1.7, -0.6, 0.5, 1.2, 2.0})
    for (int o = 0; o <= 2; ++o) CHECK(phase(p, t, o) == 0.0);
  CHECK_THROWS_AS(phase(p, 1.0, 3), std::invalid_argument);
}

TEST_CASE("phase derivatives match finite differences") {
  for (const auto& c : builtin_curve_set()) {
    const PhaseParams p(2, 0, 1, 1.3, -0.7, 0.9, c);
    for (double t : {0.6, 1.1, 1.9, -0.8, -1.5}) {
      const double h = 1e-6;
      const double d1 = (phase(p, t + h, 0) - phase(p, t - h, 0)) / (2 * h);
      const double d2 = (phase(p, t + h, 1) - phase(p, t - h, 1)) / (2 * h);
      CHECK(d1 == doctest::Approx(phase(p, t, 1)).epsilon(1e-6));
      CHECK(d2 == doctest::Approx(phase(p, t, 2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("kernel integral: disjoint supports and the unmodulated value") {
  const BumpFunction psi;
  for (double s : {4.01, -4.5, 9.0}) {
    const PhaseParams p(1, 0, 0, 1.0, 1.0, s, kSquare);
    CHECK(kernel_integral(p, psi) == cplx(0.0));
  }
  const PhaseParams p(0, 0, 0, 0.0, 0.0, 0.0, kSquare);
  const cplx v = kernel_integral(p, psi);
  auto f = [&](double t) { return psi(t) * psi(t) / (t * t); };
  const double oracle = simpson(f, -2.0, -0.5, 200000) + simpson(f, 0.5, 2.0, 200000);
  CHECK(v.real() > 0);
  CHECK(std::abs(v.imag()) < 1e-12);
  CHECK(std::abs(v.real() - oracle) < 1e-6);
}

TEST_CASE("kernel integral agrees with the uniform reference and the triangle bound") {
  const BumpFunction psi;
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    const int k = static_cast<int>(rng.integer(0, 4));
    const int nx = static_cast<int>(rng.integer(-2, 2));
    const int nz = static_cast<int>(rng.integer(-2, 2));
    const double ux = rng.sign() * rng.log_uniform(0.1, 4);
    const double uz = rng.sign() * rng.log_uniform(0.1, 4);
    const double s = rng.uniform(-4.5, 4.5);
    const PhaseParams p(k, nx, nz, ux, uz, s, kSquare);
    const cplx a = kernel_integral(p, psi);
    const cplx b = kernel_integral_reference(p, psi);
    CHECK_MESSAGE(std::abs(a - b) < 1e-6 * (1 + std::abs(b)), "k=", k, " s=", s);
    auto mod = [&](double t) {
      const double w = p.h * t - p.s;
      return (w == 0.0 || t == 0.0) ? 0.0 : std::abs(psi(w) / w * psi(t) / t);
    };
    const double bound = simpson(mod, -2.0, -0.5, 20000) + simpson(mod, 0.5, 2.0, 20000);
    CHECK(std::abs(a) <= bound * (1 + 1e-3) + 1e-9);
  }
}

TEST_CASE("kernel bound verification") {
  const auto samples = kernel_sample_set(kSquare, 0, 4);
  const KernelEstimateReport r = verify_kernel_bound(kSquare, samples);
  CHECK(r.support_zero);
  CHECK(r.bound_holds);
  for (const auto& s : r.samples) {
    if (std::abs(s.s) > 4) CHECK(s.lhs == 0.0);
    if (s.shape > 0) CHECK(s.lhs <= r.c_hat * s.shape * (1 + 1e-12));
  }
  const double thr = case_a_threshold(r.constants);
  CHECK(thr == doctest::Approx(1.0 / (4 * std::pow(r.constants.c1, 3) * r.constants.c4)));
  for (const auto& s : r.samples) CHECK(s.case_a == (s.h <= thr));
  CHECK_THROWS_AS(verify_kernel_bound(kSquare, {}), std::invalid_argument);
}

TEST_CASE("kernel example per-k maxima match the regression fixture") {
  const json fx = load_fixtures(default_fixtures_path());
  std::vector<PhaseParams> set;
  for (int k = 2; k <= 4; ++k)
    for (double s : {-2.0, -0.5, 0.5, 2.0}) set.emplace_back(k, 0, 0, 1.0, 1.0, s, kSquare);
  const auto r = verify_kernel_bound(kSquare, set);
  for (int k = 2; k <= 4; ++k) {
    const double want = fixture_number(fx, "regression/kernel_example_per_k/" + std::to_string(k));
    CHECK(r.per_k_max.at(k) == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("van der Corput examples") {
  const auto lin = van_der_corput_check([](double t) { return PhaseValues{10 * t, 10, 0}; }, 0, 1);
  CHECK(lin.lhs == doctest::Approx(2 * std::abs(std::sin(5.0)) / 10).epsilon(1e-9));
  CHECK(lin.rhs == doctest::Approx(0.2));
  CHECK(lin.pass);
  const auto quad = van_der_corput_check([](double t) { return PhaseValues{t * t, 2 * t, 2}; }, 1, 5);
  CHECK(quad.sigma1 == doctest::Approx(2));
  CHECK(quad.sigma2 == doctest::Approx(2));
  CHECK(quad.pass);
  CHECK_THROWS_AS(van_der_corput_check([](double t) { return PhaseValues{t * t, 2 * t, 2}; }, -1, 1),
                  HypothesisViolated);
  CHECK_THROWS_AS(van_der_corput_check([](double) { return PhaseValues{1, 0, 0}; }, 0, 1), HypothesisViolated);
}

TEST_CASE("van der Corput property on random cubic phases") {
  Rng rng(17);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const double c1 = rng.uniform(1, 30), c2 = rng.uniform(-5, 5), c3 = rng.uniform(-1, 1);
    const double a = rng.uniform(0, 1), b = a + rng.uniform(0.1, 2);
    const auto eval = [=](double t) {
      return PhaseValues{c1 * t + c2 * t * t + c3 * t * t * t, c1 + 2 * c2 * t + 3 * c3 * t * t, 2 * c2 + 6 * c3 * t};
    };
    VanDerCorputResult r{};
    try {
      r = van_der_corput_check(eval, a, b);
    } catch (const HypothesisViolated&) {
      continue;
    }
    CHECK(r.pass);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("matrix lower bound") {
  const auto id = matrix_lower_bound_check({{{1, 0}, {0, 1}}}, {1, 0});
  CHECK(id.lhs == doctest::Approx(1));
  CHECK(id.rhs == doctest::Approx(1));
  CHECK(id.pass);
  const auto d = matrix_lower_bound_check({{{2, 0}, {0, 3}}}, {1, 0});
  CHECK(d.lhs == doctest::Approx(2));
  CHECK(d.rhs == doctest::Approx(2));
  CHECK(d.pass);
  CHECK(spectral_norm({{{3, 4}, {0, 0}}}) == doctest::Approx(5));
  CHECK_THROWS_AS(matrix_lower_bound_check({{{1, 2}, {2, 4}}}, {1, 0}), HypothesisViolated);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    Matrix2 a{{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, {rng.uniform(-10, 10), rng.uniform(-10, 10)}}};
    if (std::abs(a[0][0] * a[1][1] - a[0][1] * a[1][0]) <= 0.1) continue;
    const double th = rng.uniform(0, 2 * M_PI);
    CHECK(matrix_lower_bound_check(a, {std::cos(th), std::sin(th)}).pass);
  }
}

TEST_CASE("interval count examples") {
  CHECK(interval_count(kSquare, 0, 0, 1, 1, -10, 10, 20000) == 0);
  CHECK(interval_count(kSquare, 1, 0, 0, 1, -10, 10, 20000) == 2);
  CHECK(interval_count(kSquare, 1, 1, 1, 0.5, -10, 10, 20000) == 1);
  CHECK(interval_count(kSquare, 1, 0, 0, 1, -10, 10, 80000) == 2);
  CHECK_THROWS_AS(interval_count(kSquare, 1, 1, 1, 0, -10, 10, 20000), std::invalid_argument);
}

TEST_CASE("case B matrix: closed form for the parabola and the chain inequality") {
  {
    const PhaseParams p(0, 0, 0, 0.0, 0.0, 0.5, kSquare);
    const auto m = case_b_matrix(p, 1.0);
    CHECK(m.upsilon_norm == 0.0);
    CHECK(m.lower_bound == 0.0);
  }
  {
    const PhaseParams p(1, 0, 0, 1.0, 1.0, 0.0, kSquare);
    CHECK(case_b_matrix(p, 1.2).det == doctest::Approx(0.0));
  }
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const int k = static_cast<int>(rng.integer(0, 3));
    const int nx = static_cast<int>(rng.integer(-2, 0)), nz = static_cast<int>(rng.integer(0, 2));
    const double s = rng.uniform(-4, 4);
    const PhaseParams p(k, nx, nz, rng.sign() * rng.log_uniform(0.1, 10), rng.sign() * rng.log_uniform(0.1, 10), s,
                        kSquare);
    const double t = rng.sign() * rng.uniform(0.5, 2);
    const double w = p.h * t - p.s;
    if (std::abs(w) < 1e-3) continue;
    const auto m = case_b_matrix(p, t);
    CHECK(m.det == doctest::Approx(p.h * std::abs(p.s) / std::abs(t * w)).epsilon(1e-9));
    // M upsilon = (Q', Q'')
    const double q1 = m.m[0][0] * m.upsilon[0] + m.m[0][1] * m.upsilon[1];
    const double q2 = m.m[1][0] * m.upsilon[0] + m.m[1][1] * m.upsilon[1];
    CHECK(q1 == doctest::Approx(phase(p, t, 1)).epsilon(1e-9));
    CHECK(q2 == doctest::Approx(phase(p, t, 2)).epsilon(1e-9));
    CHECK(std::hypot(q1, q2) >= m.lower_bound * (1 - 1e-9));
  }
}

TEST_CASE("case A explicit bounds") {
  const auto r = case_a_check(builtin_curve_set(), 60, 4);
  CHECK(r.passed());
}

TEST_CASE("kernel shape") {
  CHECK(kernel_shape(0, 0.5, 0.125, 7.0 / 16) == 2.0);
  CHECK(kernel_shape(0, 1.0, 0.125, 7.0 / 16) == 2.0);
  CHECK(kernel_shape(0, 5.0, 0.125, 7.0 / 16) == 0.0);
  CHECK(kernel_shape(8, 0.4, 0.125, 7.0 / 16) == doctest::Approx(1.0 + std::exp2(-3.5)));
  CHECK(kernel_shape(8, 0.6, 0.125, 7.0 / 16) == doctest::Approx(std::exp2(-3.5)));
}

}
