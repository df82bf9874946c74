#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curveflow/harness.hpp"

namespace curveflow {

// power 1.5, 2, 3; power_odd 2.5; t2log; int_power_log 2.
std::vector<Curve> builtin_curve_set();

// CURVEFLOW_FIXTURES if set, else the thresholds file shipped with the sources.
std::filesystem::path default_fixtures_path();
json load_fixtures(const std::filesystem::path& path);
// Value at a '/'-separated key path; throws naming the key when absent.
double fixture_number(const json& fixtures, const std::string& key);

// Experiment settings shared by the CLI defaults and the acceptance run.
namespace preset {

constexpr std::uint64_t seed = 20240601;

TestFunctionFamily sweep_family();  // gaussians on [-6, 6], step 1/32
std::vector<ModulationField> sweep_modulations(std::uint64_t seed = preset::seed);
std::vector<double> sweep_ps();

TestFunctionFamily decay_family();  // modulated gaussians on [-4, 4]
constexpr int decay_k_max = 8;

Grid2DSpec annulus_grid();
TestFunctionFamily annulus_family();
ModulationField annulus_modulation(std::uint64_t seed = preset::seed);

TestFunctionFamily growth_family();  // indicators on [-6, 6]
std::vector<double> growth_sigmas();

TestFunctionFamily domination_family();
DominationConfig domination_config();

}  // namespace preset

}  // namespace curveflow
