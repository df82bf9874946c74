#pragma once

#include <string>
#include <vector>

namespace curveflow {

// The measurable modulation u(x).
class ModulationField {
 public:
  enum class Kind { constant, piecewise, polynomial, sampled };

  static ModulationField constant(double v);
  // values.size() == breakpoints.size() + 1; values[0] applies left of breakpoints[0].
  static ModulationField piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static ModulationField polynomial(std::vector<double> coeffs);  // c0 + c1 x + ...
  // Linear interpolation between samples, clamped outside.
  static ModulationField sampled(double origin, double step, std::vector<double> samples);

  // Parses const:V, steps:b1,b2,...;v0,v1,..., poly:c0,c1,..., or steps-file:PATH.
  static ModulationField parse(const std::string& spec);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  // Upper bound of |u| over [lo, hi].
  double max_abs(double lo, double hi) const;
  std::string describe() const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Kind kind_ = Kind::constant;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double origin_ = 0, step_ = 1;
};

}  // namespace curveflow
