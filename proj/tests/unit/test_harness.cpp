#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "curveflow/errors.hpp"
#include "curveflow/harness.hpp"
#include "curveflow/presets.hpp"
#include "helpers.hpp"

using namespace curveflow;
using testutil::indicator;
using testutil::sample;

namespace {
const Curve kSquare = builtin_curve("power", 2.0);
}

TEST_SUITE("harness") {

TEST_CASE("lp norm examples") {
  const double h = 1.0 / 64;
  const auto chi = indicator(0, 1, -1, h, 193);
  const auto closed = sample(-1, h, 193, [](double x) { return cplx(x > -1e-12 && x < 1 + 1e-12 ? 1.0 : 0.0); });
  for (double p : {1.5, 2.0, 4.0}) {
    CHECK(std::abs(lp_norm(chi, p) - 1.0) <= h);
    CHECK(std::abs(lp_norm(closed, p) - 1.0) <= h);
  }
  const auto x = sample(0, 1e-3, 1001, [](double t) { return cplx(t); });
  CHECK(std::abs(lp_norm(x, 2.0) - 1.0 / std::sqrt(3.0)) < 1e-4);
  CHECK_THROWS_AS(lp_norm(x, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lp_norm(x, INFINITY), std::invalid_argument);

  GridFunction2D f(0, 0.5, 3, 0, 0.25, 4, X2Boundary::periodic);
  for (auto& v : f.values) v = 2.0;
  // x1 extent 1 (trapezoid), x2 period 1.
  CHECK(lp_norm(f, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("family members are deterministic with finite nonzero norms") {
  for (auto kind : {FamilyKind::indicators, FamilyKind::gaussians, FamilyKind::modulated_gaussians,
                    FamilyKind::random_bandlimited}) {
    TestFunctionFamily fam;
    fam.kind = kind;
    fam.count = 3;
    fam.seed = 42;
    const auto a = fam.members();
    const auto b = fam.members();
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].values == b[i].values);
      for (double p : {4.0 / 3.0, 2.0, 4.0}) {
        const double n = lp_norm(a[i], p);
        CHECK(std::isfinite(n));
        CHECK(n > 0);
      }
    }
    CHECK(parse_family_kind(to_string(kind)) == kind);
    const auto m2 = fam.members_2d(preset::annulus_grid());
    CHECK(m2.size() == 3);
    CHECK(m2.front().x2_boundary == X2Boundary::periodic);
  }
  CHECK_THROWS_AS(parse_family_kind("wavelets"), std::invalid_argument);
}

TEST_CASE("operator norm estimates") {
  const auto fam = preset::sweep_family().members();
  const auto id = estimate_operator_norm(Operator1D([](const GridFunction1D& f) { return f; }), fam, 2.0);
  CHECK(std::abs(id.value - 1.0) < 1e-10);
  const auto two = estimate_operator_norm(Operator1D([](const GridFunction1D& f) {
                                            auto g = f;
                                            for (auto& v : g.values) v *= 2.0;
                                            return g;
                                          }),
                                          fam, 3.0);
  CHECK(two.value == doctest::Approx(2.0));

  auto with_zero = fam;
  with_zero.push_back(sample(-6, 1.0 / 32, 385, [](double) { return cplx(0.0); }));
  const auto e = estimate_operator_norm(Operator1D([](const GridFunction1D& f) { return f; }), with_zero, 2.0);
  CHECK(e.skipped == 1);
  CHECK(std::isnan(e.ratios.back()));
  std::vector<GridFunction1D> zeros{with_zero.back()};
  CHECK_THROWS_AS(estimate_operator_norm(Operator1D([](const GridFunction1D& f) { return f; }), zeros, 2.0),
                  EmptyFamily);
}

TEST_CASE("hardy-littlewood norm on indicators matches the regression fixture") {
  const json fx = load_fixtures(default_fixtures_path());
  const auto r = estimate_operator_norm(Operator1D([](const GridFunction1D& f) { return hl_maximal(f); }),
                                        preset::growth_family().members(), 2.0);
  CHECK(r.value >= 1.0);
  CHECK(r.value == doctest::Approx(fixture_number(fx, "regression/hl_maximal_indicators_p2")).epsilon(1e-9));
}

TEST_CASE("modulation sweep plumbing") {
  TestFunctionFamily fam;
  fam.count = 2;
  fam.seed = 3;
  fam.grid = {-4, 1.0 / 16, 129};
  const auto members = fam.members();
  const PVConfig cfg;
  const OperatorBuilder build = [&](const ModulationField& u) {
    return Operator1D([=](const GridFunction1D& f) { return carleson_apply(f, u, kSquare, cfg); });
  };
  const auto single = sweep_modulations(build, {ModulationField::constant(2.0)}, members, 2.0);
  CHECK(single.aggregate["dispersion"].get<double>() == 1.0);

  const std::vector<ModulationField> us{ModulationField::constant(0.0), ModulationField::piecewise({0.0}, {3.0, -50.0})};
  const auto reps = sweep_modulations(build, us, members, std::vector<double>{2.0, 4.0});
  REQUIRE(reps.size() == 2);
  const auto classical = estimate_operator_norm(build(us[0]), members, 2.0);
  CHECK(reps[0].samples[0]["norm"].get<double>() == doctest::Approx(classical.value).epsilon(1e-12));
  // Aggregates are recomputable from the samples.
  for (const auto& r : reps) {
    std::vector<double> norms;
    for (const auto& s : r.samples) norms.push_back(s["norm"].get<double>());
    CHECK(r.aggregate["dispersion"].get<double>() == doctest::Approx(dispersion(norms)));
  }
  CHECK(dispersion({2.0}) == 1.0);
  CHECK(dispersion({1.0, 4.0, 2.0}) == 4.0);
}

TEST_CASE("random step modulations") {
  const auto a = random_step_modulations(5, -6, 6, 4, 1e-6, 1e6, 9);
  const auto b = random_step_modulations(5, -6, 6, 4, 1e-6, 1e6, 9);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].describe() == b[i].describe());
    CHECK(a[i].values().size() == 4);
    for (std::size_t j = 1; j < a[i].breakpoints().size(); ++j) CHECK(a[i].breakpoints()[j] > a[i].breakpoints()[j - 1]);
    for (double v : a[i].values()) {
      CHECK(std::abs(v) >= 1e-6);
      CHECK(std::abs(v) <= 1e6);
    }
  }
}

TEST_CASE("decay fit plumbing") {
  std::vector<int> ks{0, 1, 2, 3, 4, 5};
  std::vector<double> r, c;
  for (int k : ks) {
    r.push_back(std::ldexp(1.0, -k));
    c.push_back(0.3);
  }
  CHECK(fit_decay(ks, r).slope == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(fit_decay(ks, c).slope == doctest::Approx(0.0));
  // Least squares with a known solution.
  const auto f = fit_decay({0, 1, 2}, {1.0, 0.25, 0.25});
  CHECK(f.slope == doctest::Approx(-1.0));
  CHECK(f.intercept == doctest::Approx(-1.0 / 3.0));
  std::vector<double> tiny{1.0, 0.5, 1e-20, 0.125};
  const auto t = fit_decay({0, 1, 2, 3}, tiny);
  CHECK(t.ks.size() == 2);
  CHECK_FALSE(t.note.empty());
  CHECK_THROWS_AS(fit_decay({0, 1}, {1.0}), std::invalid_argument);
}

TEST_CASE("unmodulated single-annulus ratios do not depend on the level") {
  Grid2DSpec g;
  g.origin1 = -6;
  g.step1 = 0.25;
  g.n1 = 49;
  g.n2 = 256;
  TestFunctionFamily fam;
  fam.kind = FamilyKind::gaussians;
  fam.count = 2;
  fam.seed = 21;
  const auto rep = single_annulus_experiment(kSquare, ModulationField::constant(0.0), fam.members_2d(g), -2, 2, 2.0,
                                             PVConfig{});
  CHECK(rep.aggregate["annuli"].get<int>() == 5);
  CHECK(rep.aggregate["dispersion"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("square function") {
  const Grid2DSpec g = preset::annulus_grid();
  const auto zero = square_function_experiment(kSquare, ModulationField::constant(1.0), g.make(), -2, 2, 2.0, PVConfig{});
  CHECK_FALSE(zero.ratio.has_value());
  CHECK(zero.sq_norm == 0.0);
}

TEST_CASE("square function ratio matches the regression fixture" * doctest::test_suite("slow")) {
  const json fx = load_fixtures(default_fixtures_path());
  TestFunctionFamily def = preset::annulus_family();
  def.kind = FamilyKind::random_bandlimited;
  def.count = 1;
  const auto f = def.members_2d(preset::annulus_grid()).front();
  const auto sq = square_function_experiment(kSquare, ModulationField::constant(1.0), f, -2, 2, 2.0, PVConfig{});
  REQUIRE(sq.ratio.has_value());
  CHECK(*sq.ratio == doctest::Approx(fixture_number(fx, "regression/square_fn_ratio")).epsilon(1e-9));
}

TEST_CASE("log growth fit") {
  const std::vector<double> s{0, 4, 16, 64, 256};
  std::vector<double> n;
  for (double x : s) n.push_back(1.7 * std::pow(std::log(2 + x), 0.8));
  const auto f = fit_log_growth(s, n);
  CHECK(f.a == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(f.b == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("shifted growth probe at zero shift reproduces the maximal function norm") {
  TestFunctionFamily fam = preset::growth_family();
  fam.count = 3;
  const auto rep = shifted_growth_probe({0.0, 4.0, 16.0}, fam.members(), 2.0);
  CHECK(rep.verdicts.at("sigma0_equals_hl"));
  CHECK_THROWS_AS(shifted_growth_probe({4.0, 0.0}, fam.members(), 2.0), std::invalid_argument);
}

TEST_CASE("covering geometry example") {
  const auto g = covering_geometry(kSquare, 1.0, 0, 0, 0);
  CHECK(g.n_l == 0);
  CHECK(g.bracket_lo == doctest::Approx(3.0));
  CHECK(g.bracket_hi == doctest::Approx(4.0));
  CHECK(g.N_k == 3);
  CHECK(g.interval_length == doctest::Approx(0.5));
  CHECK(g.bracket_ok);
  CHECK(g.sandwich_ok);
  CHECK(g.j_bounds_ok);
  REQUIRE(g.J_lengths.size() == 3);
  for (double j : g.J_lengths) {
    CHECK(j >= 1.0);
    CHECK(j <= 5.0);
  }
  CHECK_THROWS_AS(covering_geometry(kSquare, 0.0, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("covering geometry invariants over random draws") {
  const auto rep = covering_sweep(builtin_curve_set(), 300, 0, 4, 77);
  CHECK(rep.verdicts.at("no_hard_violations"));
  int feasible = 0;
  for (const auto& s : rep.samples) {
    if (!s.contains("N_k")) continue;
    ++feasible;
    CHECK(s["ok"].get<bool>());
  }
  CHECK(feasible > 100);
}

TEST_CASE("quartic tail") {
  double direct = 0;
  for (long long t = 9; t <= 2000000; ++t) direct += 2.0 * std::pow(1.0 + static_cast<double>(t), -4.0);
  CHECK(quartic_tail(8) == doctest::Approx(direct).epsilon(1e-9));
  CHECK(quartic_tail(8) < 3e-3);
}

TEST_CASE("domination degenerate inputs") {
  DominationConfig cfg = preset::domination_config();
  cfg.k_hi = 1;
  cfg.points = 4;
  const Grid2DSpec g = preset::annulus_grid();
  const auto zero = domination_experiment(kSquare, ModulationField::constant(1.0), {g.make()}, cfg);
  CHECK(zero.verdicts.at("no_violations"));
  TestFunctionFamily fam = preset::domination_family();
  fam.count = 1;
  const auto rep0 = domination_experiment(kSquare, ModulationField::constant(0.0), fam.members_2d(g), cfg);
  CHECK(rep0.verdicts.at("no_violations"));
}

TEST_CASE("lemma suite and frequency sandwich on a small draw") {
  CHECK(lemma_suite(builtin_curve_set(), 50, 1).passed());
  CHECK(frequency_index_check(builtin_curve_set(), 500, 2).passed());
}

TEST_CASE("reports serialize with an environment stamp") {
  ExperimentReport r;
  r.id = "x";
  r.verdicts["a"] = true;
  r.verdicts["b"] = false;
  CHECK_FALSE(r.passed());
  const json j = r.to_json();
  CHECK(j["experiment"] == "x");
  CHECK(j["verdicts"]["b"] == false);
  const json env = environment_stamp();
  CHECK(env.contains("version"));
  CHECK(env.contains("threads"));
}

}
