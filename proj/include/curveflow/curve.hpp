#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace curveflow {

enum class Parity { odd, even };

// A curve on the half-line t > 0, extended to t < 0 by parity.
class Curve {
 public:
  // model(t, order) for t > 0 and order <= closed_orders.
  using HalfLineModel = std::function<double(double, int)>;

  Curve(std::string label, Parity parity, HalfLineModel model, int closed_orders = 3);

  // Parity-extended derivative of the given order (0..3).
  double operator()(double t, int order = 0) const;
  double eval(double t, int order = 0) const { return (*this)(t, order); }

  // Value on t > 0 without the finiteness check; may return inf.
  double half_line(double t, int order) const;

  Parity parity() const { return parity_; }
  const std::string& label() const { return label_; }
  int closed_orders() const { return closed_orders_; }

 private:
  std::string label_;
  Parity parity_;
  HalfLineModel model_;
  int closed_orders_;
};

// Families: power (even), power_odd, t2log, int_power_log.
Curve builtin_curve(std::string_view family, std::optional<double> alpha = std::nullopt);

// c * gamma(t).
Curve scaled_curve(const Curve& curve, double factor);

struct CurveConstants {
  double c1 = 0;  // sup gamma'(2t)/gamma'(t)
  double c2 = 0;  // sup t gamma''/gamma'
  double c3 = 0;  // inf t^2 |(gamma''/gamma')'|
  double c4 = 0;  // sup t gamma'/gamma
};

struct LogGrid {
  int log2_lo = -20;
  int log2_hi = 20;
  int per_octave = 16;
};

struct ConditionVerdict {
  bool pass = false;
  std::optional<double> witness;  // grid point where the check failed
  std::string detail;
};

struct CurveReport {
  std::string label;
  ConditionVerdict condition_i;
  ConditionVerdict condition_ii;
  ConditionVerdict condition_iii;
  ConditionVerdict condition_iv;
  ConditionVerdict origin;     // gamma and gamma' small at the left end of the grid
  ConditionVerdict convexity;  // gamma'' >= 0
  std::string iv_kind;         // "constant", "increasing", "decreasing" or "none"
  CurveConstants constants;
  LogGrid grid;

  bool conditions_pass() const {
    return condition_i.pass && condition_ii.pass && condition_iii.pass && condition_iv.pass;
  }
  bool all_pass() const { return conditions_pass() && origin.pass && convexity.pass; }
};

CurveReport check_conditions(const Curve& curve, const LogGrid& grid = {});

}  // namespace curveflow
