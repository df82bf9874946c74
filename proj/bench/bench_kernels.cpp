// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include <cmath>

#include "curveflow/operators.hpp"

using namespace curveflow;

namespace {

GridFunction1D gaussian_1d(std::size_t n) {
  GridFunction1D f(Grid1D{-4.0, 8.0 / static_cast<double>(n - 1), n});
  for (std::size_t i = 0; i < n; ++i) f.values[i] = std::exp(-f.x(i) * f.x(i)) * std::cos(3 * f.x(i));
  return f;
}

GridFunction2D gaussian_2d(std::size_t n1, std::size_t n2) {
  GridFunction2D f(-3.0, 6.0 / static_cast<double>(n1 - 1), n1, 0.0, 0.1, n2, X2Boundary::periodic);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      f(i, j) = std::exp(-f.x1(i) * f.x1(i)) * std::cos(2 * M_PI * f.x2(j) / (0.1 * static_cast<double>(n2)));
  return f;
}

const Curve& square() {
  static const Curve c = builtin_curve("power", 2.0);
  return c;
}

const ModulationField& steps() {
  static const ModulationField u = ModulationField::piecewise({-1.0, 1.0}, {0.5, -40.0, 3.0});
  return u;
}

template <bool Parallel>
void carleson(benchmark::State& st) {
  const auto f = gaussian_1d(static_cast<std::size_t>(st.range(0)));
  const PVConfig cfg;
  for (auto _ : st) {
    auto g = Parallel ? carleson_apply(f, steps(), square(), cfg) : reference::carleson_apply(f, steps(), square(), cfg);
    benchmark::DoNotOptimize(g.values.data());
  }
}

template <bool Parallel>
void hilbert_variable(benchmark::State& st) {
  const auto f = gaussian_2d(static_cast<std::size_t>(st.range(0)), 32);
  const PVConfig cfg;
  for (auto _ : st) {
    auto g = Parallel ? hilbert_variable_apply(f, steps(), square(), cfg)
                      : reference::hilbert_variable_apply(f, steps(), square(), cfg);
    benchmark::DoNotOptimize(g.values.data());
  }
}

template <bool Parallel>
void hl(benchmark::State& st) {
  const auto f = gaussian_1d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto g = Parallel ? hl_maximal(f) : reference::hl_maximal(f);
    benchmark::DoNotOptimize(g.values.data());
  }
}

template <bool Parallel>
void shifted(benchmark::State& st) {
  const auto f = gaussian_1d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto g = Parallel ? shifted_maximal(f, 16.0) : reference::shifted_maximal(f, 16.0);
    benchmark::DoNotOptimize(g.values.data());
  }
}

}  // namespace

BENCHMARK(carleson<true>)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);
BENCHMARK(carleson<false>)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);
BENCHMARK(hilbert_variable<true>)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(hilbert_variable<false>)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(hl<true>)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);
BENCHMARK(hl<false>)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);
BENCHMARK(shifted<true>)->Arg(257)->Unit(benchmark::kMillisecond);
BENCHMARK(shifted<false>)->Arg(257)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
