#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "curveflow/grid_io.hpp"
#include "curveflow/modulation.hpp"
#include "curveflow/random.hpp"

using namespace curveflow;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "curveflow_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("1D grids round-trip in both formats") {
  GridFunction1D f(-1.25, 0.125, {cplx(1, 2), cplx(-3.5, 1e-17), cplx(0.1, 0), cplx(M_PI, -M_E)});
  for (const char* name : {"g1.csv", "g1.cfgf"}) {
    const fs::path p = temp_file(name);
    write_grid(f, p);
    const auto g = read_grid_1d(p);
    CHECK(g.origin == f.origin);
    CHECK(g.step == f.step);
    CHECK(g.values == f.values);
    CHECK(std::holds_alternative<GridFunction1D>(read_grid(p)));
  }
  CHECK(format_for_path("x.cfgf") == GridFileFormat::binary);
  CHECK(format_for_path("x.csv") == GridFileFormat::csv);
}

TEST_CASE("2D grids round-trip with their boundary") {
  GridFunction2D f(-2, 0.5, 3, 0.0, 0.1, 4, X2Boundary::periodic);
  Rng rng(1);
  for (auto& v : f.values) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  for (const char* name : {"g2.csv", "g2.cfgf"}) {
    const fs::path p = temp_file(name);
    write_grid(f, p);
    const auto g = read_grid_2d(p);
    CHECK(g.n1 == 3);
    CHECK(g.n2 == 4);
    CHECK(g.origin2 == 0.0);
    CHECK(g.step2 == 0.1);
    CHECK(g.x2_boundary == X2Boundary::periodic);
    CHECK(g.values == f.values);
    CHECK_THROWS_AS(read_grid_1d(p), GridFormatError);
  }
}

TEST_CASE("malformed files are rejected") {
  const fs::path p = temp_file("bad.csv");
  {
    std::ofstream out(p);
    out << "# grid1d 0 0.5 3\nre,im\n1,0\n2,0\n";
  }
  CHECK_THROWS_AS(read_grid(p), GridFormatError);
  {
    std::ofstream out(p);
    out << "hello\n";
  }
  CHECK_THROWS_AS(read_grid(p), GridFormatError);
}

TEST_CASE("grid interpolation") {
  GridFunction1D f(0, 1, {0.0, 2.0, 4.0});
  CHECK(f.at(0.5) == cplx(1.0));
  CHECK(f.at(-0.1) == cplx(0.0));
  CHECK(f.at(2.5) == cplx(0.0));
  GridFunction2D g(0, 1, 2, 0, 1, 2, X2Boundary::periodic);
  g(0, 0) = 1;
  g(0, 1) = 3;
  CHECK(g.at(0, 0.5) == cplx(2.0));
  CHECK(g.at(0, 1.5) == cplx(2.0));  // wraps back to sample 0
  CHECK(g.at(0, 2.0) == cplx(1.0));
  CHECK_THROWS_AS(GridFunction1D(0, 0, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction1D(0, 1, {1.0}), std::invalid_argument);
}

TEST_CASE("modulation fields") {
  const auto c = ModulationField::parse("const:2.5");
  CHECK(c(100.0) == 2.5);
  const auto s = ModulationField::parse("steps:0,1;-1,2,3");
  CHECK(s(-0.5) == -1);
  CHECK(s(0.5) == 2);
  CHECK(s(7) == 3);
  CHECK(s.max_abs(-1, 0.5) == 2);
  const auto p = ModulationField::parse("poly:1,0,2");
  CHECK(p(3) == doctest::Approx(19));
  const auto smp = ModulationField::sampled(0, 0.5, {0, 1, 3});
  CHECK(smp(0.25) == doctest::Approx(0.5));
  CHECK(smp(9) == doctest::Approx(3));
  CHECK(ModulationField::parse(s.describe())(0.5) == 2);
  CHECK_THROWS_AS(ModulationField::piecewise({1, 0}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(ModulationField::parse("wave:1"), std::invalid_argument);
  CHECK_THROWS_AS(ModulationField::parse("steps-file:/nonexistent/file"), std::invalid_argument);

  const fs::path f = temp_file("u.txt");
  {
    std::ofstream out(f);
    out << "# leftmost value, then breakpoint,value\n4\n-1,0.5\n2,-3\n";
  }
  const auto fu = ModulationField::parse("steps-file:" + f.string());
  CHECK(fu(-2) == 4);
  CHECK(fu(0) == 0.5);
  CHECK(fu(3) == -3);
}

TEST_CASE("seeded generator is reproducible") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0);
    CHECK(u < 1);
    const long long k = r.integer(-3, 3);
    CHECK(k >= -3);
    CHECK(k <= 3);
    const double l = r.log_uniform(1e-3, 1e3);
    CHECK(l >= 1e-3 * (1 - 1e-12));
    CHECK(l <= 1e3 * (1 + 1e-12));
  }
}

}
