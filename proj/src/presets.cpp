#include "curveflow/presets.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#ifndef CURVEFLOW_FIXTURES_DEFAULT
#define CURVEFLOW_FIXTURES_DEFAULT "tests/fixtures/thresholds.json"
#endif

namespace curveflow {

std::vector<Curve> builtin_curve_set() {
  return {builtin_curve("power", 1.5),     builtin_curve("power", 2.0), builtin_curve("power", 3.0),
          builtin_curve("power_odd", 2.5), builtin_curve("t2log"),      builtin_curve("int_power_log", 2.0)};
}

std::filesystem::path default_fixtures_path() {
  if (const char* env = std::getenv("CURVEFLOW_FIXTURES"); env && *env) return env;
  return CURVEFLOW_FIXTURES_DEFAULT;
}

json load_fixtures(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open fixtures file " + path.string());
  return json::parse(is);
}

double fixture_number(const json& fixtures, const std::string& key) {
  const json* node = &fixtures;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const auto next = std::min(key.find('/', pos), key.size());
    const auto part = key.substr(pos, next - pos);
    if (!node->is_object() || !node->contains(part)) throw std::runtime_error("fixture `" + key + "` missing");
    node = &(*node)[part];
    pos = next + 1;
  }
  if (!node->is_number()) throw std::runtime_error("fixture `" + key + "` is not a number");
  return node->get<double>();
}

namespace preset {

TestFunctionFamily sweep_family() {
  TestFunctionFamily f;
  f.kind = FamilyKind::gaussians;
  f.count = 4;
  f.seed = 11;
  f.grid = {-6.0, 1.0 / 32.0, 385};
  return f;
}

std::vector<ModulationField> sweep_modulations(std::uint64_t s) {
  return random_step_modulations(20, -6.0, 6.0, 4, 1e-6, 1e6, s);
}

std::vector<double> sweep_ps() { return {4.0 / 3.0, 2.0, 4.0}; }

TestFunctionFamily decay_family() {
  TestFunctionFamily f;
  f.kind = FamilyKind::modulated_gaussians;
  f.count = 4;
  f.seed = 12;
  f.grid = {-4.0, 1.0 / 32.0, 257};
  return f;
}

Grid2DSpec annulus_grid() { return Grid2DSpec{}; }

TestFunctionFamily annulus_family() {
  TestFunctionFamily f;
  f.kind = FamilyKind::gaussians;
  f.count = 3;
  f.seed = 13;
  return f;
}

ModulationField annulus_modulation(std::uint64_t s) {
  return random_step_modulations(1, -4.0, 4.0, 4, 0.25, 1.0, s).front();
}

TestFunctionFamily growth_family() {
  TestFunctionFamily f;
  f.kind = FamilyKind::indicators;
  f.count = 8;
  f.seed = 14;
  return f;
}

std::vector<double> growth_sigmas() { return {0, 4, 16, 64, 256, 1024}; }

TestFunctionFamily domination_family() {
  TestFunctionFamily f;
  f.kind = FamilyKind::gaussians;
  f.count = 2;
  f.seed = 15;
  return f;
}

DominationConfig domination_config() { return DominationConfig{}; }

}  // namespace preset

}  // namespace curveflow
