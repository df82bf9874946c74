#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace curveflow {

using cplx = std::complex<double>;

struct Grid1D {
  double origin = 0;
  double step = 1;
  std::size_t n = 0;

  double x(std::size_t i) const { return origin + static_cast<double>(i) * step; }
  double last() const { return x(n - 1); }
};

struct GridFunction1D {
  double origin = 0;
  double step = 1;
  std::vector<cplx> values;

  GridFunction1D() = default;
  GridFunction1D(double origin_, double step_, std::vector<cplx> values_);
  GridFunction1D(const Grid1D& g, cplx fill = 0.0);

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return origin + static_cast<double>(i) * step; }
  double last() const { return x(size() - 1); }
  Grid1D grid() const { return {origin, step, size()}; }

  // Linear interpolation; zero outside the sampled interval.
  cplx at(double x) const;
};

// How a 2D grid function extends beyond its second-variable extent.
enum class X2Boundary { zero, periodic };

struct GridFunction2D {
  double origin1 = 0, step1 = 1;
  std::size_t n1 = 0;
  double origin2 = 0, step2 = 1;
  std::size_t n2 = 0;
  std::vector<cplx> values;  // row-major, index i1 * n2 + i2
  X2Boundary x2_boundary = X2Boundary::zero;

  GridFunction2D() = default;
  GridFunction2D(double o1, double h1, std::size_t n1_, double o2, double h2, std::size_t n2_,
                 X2Boundary boundary = X2Boundary::zero);

  double x1(std::size_t i) const { return origin1 + static_cast<double>(i) * step1; }
  double x2(std::size_t j) const { return origin2 + static_cast<double>(j) * step2; }
  cplx& operator()(std::size_t i, std::size_t j) { return values[i * n2 + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return values[i * n2 + j]; }
  GridFunction2D same_shape() const;

  // Bilinear interpolation; zero outside in x1, zero or wrapped in x2.
  cplx at(double x1, double x2) const;
};

double max_abs(const std::vector<cplx>& v);

}  // namespace curveflow
