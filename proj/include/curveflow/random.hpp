#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace curveflow {

// Seeded generator whose draws are identical across standard libraries
// (the distribution classes are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // log-uniform on [a, b], a > 0
  double log_uniform(double a, double b);
  // integer in [lo, hi]
  long long integer(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(engine_() % span);
  }
  double sign() { return (engine_() & 1) ? 1.0 : -1.0; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline double Rng::log_uniform(double a, double b) {
  return a * std::exp(uniform() * std::log(b / a));
}

}  // namespace curveflow
