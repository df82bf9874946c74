#pragma once

#include <stdexcept>
#include <string>

namespace curveflow {

// Grid does not contain the translates an operator needs.
class CoverageError : public std::runtime_error {
 public:
  CoverageError(const std::string& what, double missing_lo, double missing_hi)
      : std::runtime_error(what), missing_lo_(missing_lo), missing_hi_(missing_hi) {}
  double missing_lo() const { return missing_lo_; }
  double missing_hi() const { return missing_hi_; }

 private:
  double missing_lo_;
  double missing_hi_;
};

// A checker's hypothesis does not hold on the sampled data.
class HypothesisViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The integer bracket for the interval count in the covering is empty.
class GeometryInfeasible : public std::runtime_error {
 public:
  GeometryInfeasible(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Every family member had zero norm.
class EmptyFamily : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curveflow
