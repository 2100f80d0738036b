#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcurv/fields.hpp"

namespace gcurv {

// Seeded generator for smooth generic test structures: low-degree
// polynomials plus small trigonometric terms. Coefficients are printed with
// fixed precision so the generated text, and hence every result, is
// reproducible across platforms.
struct RandomOptions {
  int dim = 3;
  std::uint64_t seed = 1;
  bool lorentzian = false;      // first coordinate timelike
  bool exact_dilaton = false;   // X = 0, xi = d(phi)
  bool with_H = true;
  bool with_dilaton = true;
  double amplitude = 0.1;       // size of metric perturbation
};

AmbientStructure random_poly_structure(const RandomOptions& opt);

// Graph hypersurface x_d = c + small quadratic in (x_1..x_{d-1}), written
// over Sigma coordinates s1..s{d-1}.
std::vector<std::string> random_graph_embedding(const RandomOptions& opt, std::vector<std::string>* sigma_coords);

// Points in the cube [-radius, radius]^n.
std::vector<std::vector<double>> random_points(std::uint64_t seed, int n, int count, double radius);

std::vector<std::string> default_coords(int d);

}  // namespace gcurv
