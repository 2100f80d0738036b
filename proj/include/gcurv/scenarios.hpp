#pragma once

#include <map>
#include <optional>
#include <stdexcept>

#include "gcurv/fundamental.hpp"

namespace gcurv {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  std::string description;
  AmbientStructure ambient;
  std::optional<EmbeddingMap> embedding;
  // Hypersurface-chart points when an embedding is present, ambient points
  // otherwise.
  std::vector<std::vector<double>> points;
  bool random_points = false;  // points drawn from a seed, re-drawn by --seed
  double sample_radius = 0.3;
  std::vector<double> sample_center;
  std::map<std::string, double> tolerances;  // per suite
  // (h, k) data and grid for the reconstruction path.
  std::optional<HypersurfaceData> fundamental;
  std::optional<GridSpec> grid;

  std::vector<double> ambient_point(const std::vector<double>& p) const;
  void resample(std::uint64_t seed, int count = 5);
};

// Builtin registry. Parametrised families are also resolved by name:
// flat_trivial_<d>, sphere_in_flat_<d>, torus_constant_H_<c>,
// neutral_flat_example_m<m>, random_poly_<seed>_<d>.
std::vector<Scenario> builtin_scenarios();
Scenario find_scenario(const std::string& name);

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
// dH, signature and immersion checks at every sample point.
void validate_scenario(const Scenario& sc);

enum class Suite { Identities, Flatness, Constraints, Fundamental, All };
Suite parse_suite(const std::string& name);
const char* suite_name(Suite s);
double default_tolerance(Suite s);

// One report per sample point (plus one reconstruction report for the
// fundamental suite when (h, k) data is present). Points are evaluated
// concurrently; the result order is the point order.
std::vector<ResidualReport> run_suite(Suite suite, const Scenario& sc, std::optional<double> tol = std::nullopt);
ResidualReport evaluate_point(Suite suite, const Scenario& sc, const std::vector<double>& point,
                              std::optional<double> tol = std::nullopt);

// Deterministic JSON (no timings) and a human-readable table.
std::string reports_json(const std::string& scenario, const std::string& suite,
                         const std::vector<ResidualReport>& reports);
std::string reports_table(const std::vector<ResidualReport>& reports);

std::string mesh_json(const Immersion& im);

}  // namespace gcurv
