#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "curveflow/curve.hpp"
#include "curveflow/dyadic.hpp"
#include "curveflow/grid.hpp"
#include "curveflow/kernel.hpp"
#include "curveflow/modulation.hpp"
#include "curveflow/operators.hpp"

namespace curveflow {

using json = nlohmann::json;

struct Grid2DSpec {
  double origin1 = -4, step1 = 0.125;
  std::size_t n1 = 65;
  double origin2 = 0, step2 = 0.1;
  std::size_t n2 = 256;
  X2Boundary boundary = X2Boundary::periodic;

  GridFunction2D make() const { return {origin1, step1, n1, origin2, step2, n2, boundary}; }
};

enum class FamilyKind { indicators, gaussians, modulated_gaussians, random_bandlimited };
FamilyKind parse_family_kind(const std::string& s);
std::string to_string(FamilyKind k);

struct TestFunctionFamily {
  FamilyKind kind = FamilyKind::gaussians;
  int count = 4;
  std::uint64_t seed = 1;
  Grid1D grid{-6.0, 1.0 / 32.0, 385};

  std::vector<GridFunction1D> members() const;
  // Product-type members on the given 2D grid; the second factor is periodic when the grid is.
  std::vector<GridFunction2D> members_2d(const Grid2DSpec& spec) const;
};

double lp_norm(const GridFunction1D& f, double p);
double lp_norm(const GridFunction2D& f, double p);

using Operator1D = std::function<GridFunction1D(const GridFunction1D&)>;
using Operator2D = std::function<GridFunction2D(const GridFunction2D&)>;

struct NormEstimate {
  double value = 0;
  std::vector<double> ratios;  // per member; NaN where skipped
  int skipped = 0;
};

// max over members of ||op f||_p / ||f||_p; zero-norm members are skipped.
NormEstimate estimate_operator_norm(const Operator1D& op, const std::vector<GridFunction1D>& family,
                                    double p);
NormEstimate estimate_operator_norm(const Operator2D& op, const std::vector<GridFunction2D>& family,
                                    double p);

struct ExperimentReport {
  std::string id;
  json parameters = json::object();
  json samples = json::array();
  json aggregate = json::object();
  std::map<std::string, bool> verdicts;
  json environment = json::object();

  bool passed() const;
  json to_json() const;
};

json environment_stamp();

// Ratio max/min of positive values; 1 for a single value.
double dispersion(const std::vector<double>& values);

// ---- uniformity sweeps ----

using OperatorBuilder = std::function<Operator1D(const ModulationField&)>;

// One report per p; each operator output is computed once and reused across p.
std::vector<ExperimentReport> sweep_modulations(const OperatorBuilder& build,
                                                const std::vector<ModulationField>& u_family,
                                                const std::vector<GridFunction1D>& family,
                                                const std::vector<double>& ps,
                                                std::optional<double> threshold = std::nullopt);
ExperimentReport sweep_modulations(const OperatorBuilder& build,
                                   const std::vector<ModulationField>& u_family,
                                   const std::vector<GridFunction1D>& family, double p,
                                   std::optional<double> threshold = std::nullopt);

// Random step modulations with |values| log-uniform in [mag_lo, mag_hi] and random signs.
std::vector<ModulationField> random_step_modulations(int count, double lo, double hi, int pieces,
                                                     double mag_lo, double mag_hi,
                                                     std::uint64_t seed);

// ---- decay of the truncated pieces ----

struct DecayFit {
  std::vector<int> ks;
  std::vector<double> log2_ratios;
  double slope = 0;
  double intercept = 0;
  double residual = 0;
  std::string note;
};

// Least-squares line through (k, log2 ratio); ratios below 1e-14 end the fit range.
DecayFit fit_decay(const std::vector<int>& ks, const std::vector<double>& ratios);

DecayFit decay_experiment(const Curve& curve, const ModulationField& u,
                          const std::vector<GridFunction1D>& family, int k_max,
                          double output_step = 0.0625);

// ---- two-dimensional experiments ----

ExperimentReport single_annulus_experiment(const Curve& curve, const ModulationField& u,
                                           const std::vector<GridFunction2D>& family, int l_lo,
                                           int l_hi, double p, const PVConfig& cfg,
                                           std::optional<double> threshold = std::nullopt);

struct SquareFunctionResult {
  double sq_norm = 0;
  double f_norm = 0;
  std::optional<double> ratio;  // empty when f = 0
};
SquareFunctionResult square_function_experiment(const Curve& curve, const ModulationField& u,
                                                const GridFunction2D& f, int l_lo, int l_hi,
                                                double p, const PVConfig& cfg);

// ---- shifted maximal growth ----

struct GrowthFit {
  double a = 0, b = 0;
};
// Least squares for norm = a [log(2 + sigma)]^b.
GrowthFit fit_log_growth(const std::vector<double>& sigmas, const std::vector<double>& norms);

ExperimentReport shifted_growth_probe(const std::vector<double>& sigmas,
                                      const std::vector<GridFunction1D>& family, double p,
                                      const IntervalFamily& intervals = {4, true},
                                      std::optional<double> bound = std::nullopt);

// ---- covering geometry ----

struct ShiftGeometry {
  int k = 0, l = 0, n_l = 0;
  long long N_k = 0;
  double bracket_lo = 0, bracket_hi = 0;
  double interval_length = 0;
  std::vector<double> J_lengths;
  std::vector<double> sigma_values;
  int tau = 0;
  bool bracket_ok = false;   // N_k |I_m| within [3/2, 2] 2^(k+n_l)
  bool sandwich_ok = false;  // 1/(N_k |I_m|) within [1/2, 2/3] 2^-(k+n_l)
  bool j_bounds_ok = false;  // 1 <= |J_m| <= 1 + c1^2
  double sigma_ratio = 0;    // max |sigma_m| / ((2 c1)^(k+2) + |tau|)
};

ShiftGeometry covering_geometry(const Curve& curve, double u_abs, int l, int k, int tau,
                                const CurveConstants& constants);
ShiftGeometry covering_geometry(const Curve& curve, double u_abs, int l, int k, int tau);

ExperimentReport covering_sweep(const std::vector<Curve>& curves, int count, int k_lo, int k_hi,
                                std::uint64_t seed, double sigma_spread_bound = 2.0);

// ---- domination by shifted maximal averages ----

struct DominationConfig {
  int k_lo = 0, k_hi = 4;
  int l = 0;
  int tau_max = 8;
  int points = 48;
  std::uint64_t seed = 7;
  IntervalFamily intervals{};
  double stability_bound = 3.0;
};

ExperimentReport domination_experiment(const Curve& curve, const ModulationField& u,
                                       const std::vector<GridFunction2D>& family,
                                       const DominationConfig& cfg);

// Weight sum over |tau| > tau_max of (1 + |tau|)^-4.
double quartic_tail(int tau_max);

// ---- checks that draw random instances ----

ExperimentReport frequency_index_check(const std::vector<Curve>& curves, int count,
                                       std::uint64_t seed);
ExperimentReport lemma_suite(const std::vector<Curve>& curves, int count, std::uint64_t seed,
                             std::optional<int> count_bound = std::nullopt);
ExperimentReport case_a_check(const std::vector<Curve>& curves, int count, std::uint64_t seed);
ExperimentReport kernel_decay_experiment(const Curve& curve, const std::vector<PhaseParams>& samples,
                                         double r1, double r2, double spread_bound = 10.0);
// The declared sample set: s over [-4.5, 4.5] including 0, for several point pairs.
std::vector<PhaseParams> kernel_sample_set(const Curve& curve, int k_lo, int k_hi);

// Max deviation of sum_l psi_l(t) from 1 over log-spaced t in [2^lo, 2^hi].
double partition_deviation(int log2_lo, int log2_hi, int points);

json to_json(const CurveReport& r);
json to_json(const DecayFit& f);
json to_json(const ShiftGeometry& g);
json to_json(const KernelEstimateReport& r);

}  // namespace curveflow
