#include "curveflow/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curveflow {

ModulationField ModulationField::constant(double v) {
  ModulationField u;
  u.kind_ = Kind::constant;
  u.values_ = {v};
  return u;
}

ModulationField ModulationField::piecewise(std::vector<double> breakpoints,
                                           std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("piecewise modulation needs one more value than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw std::invalid_argument("modulation breakpoints must be strictly increasing");
    }
  }
  ModulationField u;
  u.kind_ = Kind::piecewise;
  u.breakpoints_ = std::move(breakpoints);
  u.values_ = std::move(values);
  return u;
}

ModulationField ModulationField::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial modulation needs coefficients");
  ModulationField u;
  u.kind_ = Kind::polynomial;
  u.values_ = std::move(coeffs);
  return u;
}

ModulationField ModulationField::sampled(double origin, double step, std::vector<double> samples) {
  if (samples.empty() || !(step > 0)) throw std::invalid_argument("bad sampled modulation");
  ModulationField u;
  u.kind_ = Kind::sampled;
  u.origin_ = origin;
  u.step_ = step;
  u.values_ = std::move(samples);
  return u;
}

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ModulationField ModulationField::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("modulation spec needs 'kind:'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (kind == "const") {
      const auto v = parse_list(rest);
      if (v.size() != 1) throw std::invalid_argument("const takes one value");
      return constant(v[0]);
    }
    if (kind == "poly") return polynomial(parse_list(rest));
    if (kind == "steps") {
      const auto semi = rest.find(';');
      if (semi == std::string::npos) throw std::invalid_argument("steps needs 'breaks;values'");
      return piecewise(parse_list(rest.substr(0, semi)), parse_list(rest.substr(semi + 1)));
    }
    if (kind == "steps-file") {
      // Lines "breakpoint,value"; the first line holds only the leftmost value.
      std::ifstream in(rest);
      if (!in) throw std::invalid_argument("cannot open modulation file '" + rest + "'");
      std::vector<double> bps, vals;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto row = parse_list(line);
        if (row.size() == 1 && vals.empty()) {
          vals.push_back(row[0]);
        } else if (row.size() == 2) {
          bps.push_back(row[0]);
          vals.push_back(row[1]);
        } else {
          throw std::invalid_argument("bad modulation file line '" + line + "'");
        }
      }
      return piecewise(bps, vals);
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad modulation spec '" + spec + "': " + e.what());
  }
  throw std::invalid_argument("unknown modulation kind '" + kind + "'");
}

double ModulationField::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return values_[0];
    case Kind::piecewise: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
      return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
    case Kind::polynomial: {
      double acc = 0;
      for (auto it = values_.rbegin(); it != values_.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Kind::sampled: {
      const double pos = (x - origin_) / step_;
      if (pos <= 0) return values_.front();
      const double top = static_cast<double>(values_.size() - 1);
      if (pos >= top) return values_.back();
      const auto i = static_cast<std::size_t>(pos);
      const double w = pos - static_cast<double>(i);
      return values_[i] + w * (values_[i + 1] - values_[i]);
    }
  }
  return 0;
}

double ModulationField::max_abs(double lo, double hi) const {
  double m = std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
  switch (kind_) {
    case Kind::constant: return std::abs(values_[0]);
    case Kind::piecewise:
      for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (breakpoints_[i] >= lo && breakpoints_[i] <= hi) {
          m = std::max({m, std::abs(values_[i]), std::abs(values_[i + 1])});
        }
      }
      return m;
    case Kind::polynomial:
    case Kind::sampled: {
      const int n = 1024;
      for (int i = 0; i <= n; ++i) m = std::max(m, std::abs((*this)(lo + (hi - lo) * i / n)));
      return m;
    }
  }
  return m;
}

std::string ModulationField::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto join = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  switch (kind_) {
    case Kind::constant: os << "const:" << values_[0]; break;
    case Kind::piecewise: os << "steps:"; join(breakpoints_); os << ";"; join(values_); break;
    case Kind::polynomial: os << "poly:"; join(values_); break;
    case Kind::sampled: os << "sampled:" << origin_ << ":" << step_ << ":" << values_.size(); break;
  }
  return os.str();
}

}  // namespace curveflow
