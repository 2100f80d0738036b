#pragma once

#include "gcurv/gen_curvature.hpp"
#include "gcurv/report.hpp"

namespace gcurv {

struct FlatnessReport {
  double max_gen_riemann = 0.0;
  double weyl = 0.0;
  double nabla_H = 0.0;
  double nabla_pe_plus = 0.0;   // |g nabla^+ pi e_+ - (div(e_+)/d) g|
  double nabla_pe_minus = 0.0;  // |g nabla^- pi e_- - (div(e_-)/d) g|
  double dilaton_eom = 0.0;     // ||H|^2/6 + div(e_+) - |e_+|^2|
  double q_vs_h2 = 0.0;
  double div_antisymmetry = 0.0;
  double quadratic_rm = 0.0;

  double max() const;
  // Named entries in report order.
  std::vector<std::pair<std::string, double>> fields() const;
};

// Q(A,B) for one band, A and B given as coordinate vectors.
struct QTensor {
  RealTensor g;
  RealTensor pe;  // pi e_s
  int d = 0;

  double operator()(const RealTensor& A, const RealTensor& B) const;
};
QTensor q_tensor(const Geometry& geo, int band);

// Pairs (A, B) with g(A,B) = 0, both non-null: every pair of an orthonormal
// frame plus Gram-Schmidt pairs built from seeded random vectors.
std::vector<std::pair<RealTensor, RealTensor>> orthogonal_pairs(const RealTensor& g, int random_pairs = 6,
                                                                unsigned seed = 7);
// Orthonormal frame e_a (columns) with g(e_a, e_b) = +-delta_ab.
RealTensor orthonormal_frame(const RealTensor& g);

FlatnessReport flatness_report(const Geometry& geo);
FlatnessReport flatness_report(const AmbientStructure& amb, const std::vector<double>& point);

double q_vs_h2_residual(const Geometry& geo);
double q_vs_h2_residual(const AmbientStructure& amb, const std::vector<double>& point);

// Residual of the quadratic Rm(A,B,A,B) formula for orthogonal pairs, both
// bands.
double quadratic_rm_residual(const Geometry& geo);

ResidualReport triviality_check(const Geometry& geo, double tol = 1e-8);
ResidualReport triviality_check(const AmbientStructure& amb, const std::vector<double>& point, double tol = 1e-8);

double conformal_factor_residual(const Geometry& geo, int sigma);
double conformal_factor_residual(const AmbientStructure& amb, const std::vector<double>& point, int sigma);

// Flat neutral-signature example on R^{2m}, coordinates (u, v, x2..xm,
// y2..ym), u > 0. eps = +1 realises the dilaton as X = pi e_+ (xi = 0),
// eps = -1 as xi = g(pi e_+) (X = 0).
AmbientStructure neutral_flat_example(int m, int eps = +1);

inline constexpr double kNeutralDomainMin = 1e-3;

}  // namespace gcurv
