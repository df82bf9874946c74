#include "curveflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curveflow {

GridFunction1D::GridFunction1D(double origin_, double step_, std::vector<cplx> values_)
    : origin(origin_), step(step_), values(std::move(values_)) {
  if (!(step > 0)) throw std::invalid_argument("grid step must be positive");
  if (values.size() < 2) throw std::invalid_argument("grid function needs at least 2 samples");
}

GridFunction1D::GridFunction1D(const Grid1D& g, cplx fill)
    : GridFunction1D(g.origin, g.step, std::vector<cplx>(g.n, fill)) {}

cplx GridFunction1D::at(double x) const {
  const double pos = (x - origin) / step;
  const double top = static_cast<double>(size() - 1);
  if (pos < 0) return pos > -1e-9 ? values.front() : cplx{};
  if (pos >= top) return pos < top + 1e-9 ? values.back() : cplx{};
  const auto i = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(i);
  return values[i] + w * (values[i + 1] - values[i]);
}

GridFunction2D::GridFunction2D(double o1, double h1, std::size_t n1_, double o2, double h2,
                               std::size_t n2_, X2Boundary boundary)
    : origin1(o1), step1(h1), n1(n1_), origin2(o2), step2(h2), n2(n2_),
      values(n1_ * n2_), x2_boundary(boundary) {
  if (!(h1 > 0) || !(h2 > 0)) throw std::invalid_argument("grid steps must be positive");
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("2D grid needs at least 2 samples per axis");
}

GridFunction2D GridFunction2D::same_shape() const {
  return GridFunction2D(origin1, step1, n1, origin2, step2, n2, x2_boundary);
}

cplx GridFunction2D::at(double y1, double y2) const {
  const double p1 = (y1 - origin1) / step1;
  const double top1 = static_cast<double>(n1 - 1);
  if (p1 < -1e-9 || p1 > top1 + 1e-9) return {};
  std::size_t i = p1 <= 0 ? 0 : static_cast<std::size_t>(p1);
  if (i >= n1 - 1) i = n1 - 2;
  const double w1 = std::clamp(p1 - static_cast<double>(i), 0.0, 1.0);

  double p2 = (y2 - origin2) / step2;
  std::size_t j, jn;
  double w2;
  if (x2_boundary == X2Boundary::periodic) {
    const double nn = static_cast<double>(n2);
    p2 = std::fmod(p2, nn);
    if (p2 < 0) p2 += nn;
    j = static_cast<std::size_t>(p2);
    if (j >= n2) j = n2 - 1;
    jn = (j + 1) % n2;
    w2 = p2 - static_cast<double>(j);
  } else {
    const double top2 = static_cast<double>(n2 - 1);
    if (p2 < -1e-9 || p2 > top2 + 1e-9) return {};
    j = p2 <= 0 ? 0 : static_cast<std::size_t>(p2);
    if (j >= n2 - 1) j = n2 - 2;
    jn = j + 1;
    w2 = std::clamp(p2 - static_cast<double>(j), 0.0, 1.0);
  }
  const cplx a = values[i * n2 + j], b = values[i * n2 + jn];
  const cplx c = values[(i + 1) * n2 + j], d = values[(i + 1) * n2 + jn];
  const cplx lo = a + w2 * (b - a);
  const cplx hi = c + w2 * (d - c);
  return lo + w1 * (hi - lo);
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace curveflow
