#pragma once

#include "curveflow/curve.hpp"
#include "curveflow/dyadic.hpp"
#include "curveflow/grid.hpp"
#include "curveflow/modulation.hpp"

namespace curveflow {

struct PVConfig {
  double epsilon = 1e-4;
  double radius = 1e3;
  double substep = 1e-4;
  // Panels widen to growth * t away from the origin.
  double growth = 0.05;
  // Bound on phase curvature per panel, |phi''| w^2 / 8.
  double phase_tolerance = 1e-3;

  void validate() const;
};

struct ShiftedInterval {
  double a, b, sigma;

  double length() const { return b - a; }
  // The two pieces of the shifted set, left piece first.
  std::pair<double, double> left_piece() const;
  std::pair<double, double> right_piece() const;
};

// Which intervals the shifted maximal function ranges over.
struct IntervalFamily {
  // Left endpoints of length-2^j (in samples) intervals lie on a lattice of spacing
  // max(1, 2^j / density); density 0 means every grid point.
  int density = 4;
  // Only intervals centred on the evaluation point.
  bool centered = false;
};

// Carleson-type operator: p.v. int e^{i u(x) gamma(t)} f(x - t) dt / t.
GridFunction1D carleson_apply(const GridFunction1D& f, const ModulationField& u, const Curve& curve,
                              const PVConfig& cfg);
GridFunction1D carleson_apply(const GridFunction1D& f, const ModulationField& u, const Curve& curve,
                              const PVConfig& cfg, const Grid1D& out);
cplx carleson_at(const GridFunction1D& f, double x, double u, const Curve& curve,
                 const PVConfig& cfg);

// Hilbert transform along the variable curve (x1 - t, x2 - u(x1) gamma(t)).
GridFunction2D hilbert_variable_apply(const GridFunction2D& f, const ModulationField& u,
                                      const Curve& curve, const PVConfig& cfg);
GridFunction2D directional_hilbert_apply(const GridFunction2D& f, double lambda,
                                         const Curve& curve, const PVConfig& cfg);

// S_k f(x) = int e^{i u gamma(t)} f(x - t) psi_{k + n(x)}(t) dt / t.
GridFunction1D truncated_piece_apply(const GridFunction1D& f, const ModulationField& u,
                                     const Curve& curve, int k, const BumpFunction& bump);
GridFunction1D truncated_piece_apply(const GridFunction1D& f, const ModulationField& u,
                                     const Curve& curve, int k, const BumpFunction& bump,
                                     const Grid1D& out);
cplx truncated_piece_at(const GridFunction1D& f, double x, double u, const Curve& curve, int k,
                        const BumpFunction& bump);

// Low-frequency split: t1 = int (e^{iu gamma} - 1) f(x-t) phi(t)/t, t2 = p.v. int f(x-t) phi(t)/t,
// phi = sum_{j < n(x)} psi_j. At u = 0 the whole operator is low frequency.
struct LowFrequencyParts {
  GridFunction1D t1;
  GridFunction1D t2;
};
LowFrequencyParts low_frequency_parts(const GridFunction1D& f, const ModulationField& u,
                                      const Curve& curve, const PVConfig& cfg);

// Annulus piece int P_l f(x1 - t, x2 - u gamma(t)) psi_{k + n_l(x1)}(t) dt / t on a projected f.
GridFunction2D annulus_piece_apply(const GridFunction2D& f, const ModulationField& u,
                                   const Curve& curve, int k, int l, const BumpFunction& bump);
cplx annulus_piece_at(const GridFunction2D& f, double x1, double x2, double u, const Curve& curve,
                      int k, int l, const BumpFunction& bump);

GridFunction1D hl_maximal(const GridFunction1D& f);
GridFunction1D maximal_truncated_hilbert(const GridFunction1D& f, const PVConfig& cfg);
GridFunction1D shifted_maximal(const GridFunction1D& f, double sigma,
                               const IntervalFamily& family = {});

// Shifted maximal value at sample index i of a row whose |values| have cumulative
// trapezoid sums `cumulative` (size n, cumulative[0] = 0).
double shifted_maximal_at(const std::vector<double>& abs_values,
                          const std::vector<double>& cumulative, double step, std::size_t i,
                          double sigma, const IntervalFamily& family);
std::vector<double> cumulative_trapezoid(const std::vector<double>& abs_values, double step);

// |f| along a periodic row; shifted intervals wrap around the period.
struct PeriodicRow {
  std::vector<double> values;
  double step = 1;
  std::vector<double> cumulative;  // size n + 1, closing segment included

  PeriodicRow(std::vector<double> abs_values, double step);
  // Integral of |f| from sample 0 to position p (in samples), any real p.
  double cumulative_at(double p) const;
  double shifted_maximal_at(std::size_t i, double sigma, const IntervalFamily& family) const;
};

namespace reference {
// Serial implementations that share no code with the parallel kernels; used as test oracles
// and as the baseline in the benchmark.
GridFunction1D carleson_apply(const GridFunction1D& f, const ModulationField& u,
                              const Curve& curve, const PVConfig& cfg);
GridFunction2D hilbert_variable_apply(const GridFunction2D& f, const ModulationField& u,
                                      const Curve& curve, const PVConfig& cfg);
GridFunction1D hl_maximal(const GridFunction1D& f);
GridFunction1D shifted_maximal(const GridFunction1D& f, double sigma,
                               const IntervalFamily& family = {});
}  // namespace reference

}  // namespace curveflow
