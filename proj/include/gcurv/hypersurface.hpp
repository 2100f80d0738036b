#pragma once

#include "gcurv/gen_curvature.hpp"
#include "gcurv/report.hpp"

namespace gcurv {

inline constexpr double kNullNormalTol = 1e-8;

// Hypersurface chart y -> F(y) into the ambient chart. Orientation +1 picks
// the unit normal n with det[d_1 F, ..., d_{d-1} F, n] > 0.
struct EmbeddingMap {
  Chart sigma_chart;
  std::vector<Expr> F;
  int orientation = +1;

  static EmbeddingMap from_strings(Chart sigma_chart, const std::vector<std::string>& components,
                                   int orientation = +1);
  std::vector<double> image(const std::vector<double>& sigma_point) const;
};

struct InducedStructure {
  int d = 0;  // ambient dimension
  double epsilon = 1.0;
  RealTensor h, H_par, H_perp, xi_par, X_par;
  double x = 0.0;
  double e_perp_plus = 0.0, e_perp_minus = 0.0;  // <e, n_+>, <e, n_->
};

struct ShapeData {
  RealTensor n;  // ambient components of the unit normal
  RealTensor k;  // k(X,Y) = g(nabla_X n, Y)
  RealTensor A;  // (a, b) = (A d_b)^a
  RealTensor K_pure_plus, K_pure_minus;    // K^{n_s}(sigma_s A, sigma_s B)
  RealTensor K_mixed_plus, K_mixed_minus;  // K^{n_s}(sigma_-s A, sigma_s B)
  double T_plus = 0.0, T_minus = 0.0;
  RealTensor L_plus, L_minus;  // on sigma_s-lifted tangent vectors

  const RealTensor& K_pure(int band) const { return band > 0 ? K_pure_plus : K_pure_minus; }
  const RealTensor& K_mixed(int band) const { return band > 0 ? K_mixed_plus : K_mixed_minus; }
  double T(int band) const { return band > 0 ? T_plus : T_minus; }
  const RealTensor& L(int band) const { return band > 0 ? L_plus : L_minus; }
};

// Everything along the hypersurface as jets in the Sigma coordinates. Jet
// orders: h, n, H_par, H_perp, X_par, xi_par 2; k, K blocks, T 1; L 2.
struct HypersurfaceJets {
  int d = 0;  // ambient dimension
  int m = 0;  // d - 1
  std::vector<double> sigma_point, ambient_point;
  double epsilon = 1.0;
  Geometry ambient;  // at F(y), ambient coordinates
  Geometry sigma;    // (h, H_par, X_par, xi_par) on Sigma
  JetTensor E;       // (mu, a) = d_a F^mu
  JetTensor n;
  JetTensor pe_amb[2];  // ambient pi e_s along Sigma, index 0 for +
  JetTensor k, H_perp;
  Jet x;
  Jet e_perp[2];  // <e, n_s>
  JetTensor K_pure[2], K_mixed[2], L[2];
  Jet T[2];
  // Abstract data with no embedding: the ambient Rm^D terms of the Gauss and
  // Codazzi identities are taken to vanish, and E, n, ambient are unused.
  bool flat_ambient = false;
};

HypersurfaceJets hypersurface_jets(const AmbientStructure& amb, const EmbeddingMap& emb,
                                   const std::vector<double>& sigma_point);

// K blocks, T and L from k, H_perp, e_perp, epsilon and the Sigma structure.
void fill_shape_blocks(HypersurfaceJets& hj);

InducedStructure induce(const HypersurfaceJets& hj);
InducedStructure induce(const AmbientStructure& amb, const EmbeddingMap& emb, const std::vector<double>& sigma_point);

ShapeData gen_second_fundamental_form(const HypersurfaceJets& hj);
ShapeData gen_second_fundamental_form(const AmbientStructure& amb, const EmbeddingMap& emb,
                                      const std::vector<double>& sigma_point);

// D^Sigma on the frame (sigma_+ d_a, sigma_- d_a) of E_Sigma: the projected
// ambient canonical connection, with the chi coupling 1/(d-1) of the ambient
// dimension.
FrameConnection induced_connection(const HypersurfaceJets& hj);
FrameConnection induced_connection(const AmbientStructure& amb, const EmbeddingMap& emb,
                                   const std::vector<double>& sigma_point);

// tr D v for a section v of E given by frame components (jets).
Jet frame_divergence(const FrameConnection& fc, const JetTensor& v);

ResidualReport gauss_residuals(const HypersurfaceJets& hj, double tol = 1e-7);
ResidualReport gauss_residuals(const AmbientStructure& amb, const EmbeddingMap& emb,
                               const std::vector<double>& sigma_point, double tol = 1e-7);

ResidualReport codazzi_residuals(const HypersurfaceJets& hj, double tol = 1e-7);
ResidualReport codazzi_residuals(const AmbientStructure& amb, const EmbeddingMap& emb,
                                 const std::vector<double>& sigma_point, double tol = 1e-7);

// 2 Rc^s(n_-s, n_s) - eps Sc  against  -eps Sc_Sigma - |K^s|^2 + (T_+^2 + T_-^2)/2.
struct EnergyConstraint {
  double lhs[2] = {0.0, 0.0};  // index 0 for band +
  double rhs[2] = {0.0, 0.0};
  double residual = 0.0;
};
EnergyConstraint energy_constraint(const HypersurfaceJets& hj);
EnergyConstraint energy_constraint(const AmbientStructure& amb, const EmbeddingMap& emb,
                                   const std::vector<double>& sigma_point);

// Rc^s(a_-s, n_s) against div^{e_s}(k - s i_n H / 2)(pi a) - H^2(n, pi a)/4
// - pi a(T_s). rhs_frame evaluates div_Sigma of the shape operator by tracing
// D^Sigma on E_Sigma instead of through the classical formula.
struct MomentumConstraint {
  RealTensor lhs[2], rhs[2], rhs_frame[2];
  double residual = 0.0;
  double frame_residual = 0.0;  // |rhs - rhs_frame|
};
MomentumConstraint momentum_constraint(const HypersurfaceJets& hj);
MomentumConstraint momentum_constraint(const AmbientStructure& amb, const EmbeddingMap& emb,
                                       const std::vector<double>& sigma_point);

// Classical form of the constraints for e = 2 xi, d xi = 0. Each value is
// LHS - RHS of the displayed equation and vanishes for generalised Einstein
// ambient data.
struct ClassicalConstraints {
  double energy = 0.0;
  RealTensor momentum;  // div k - d tr k - <H_perp, H_par>/4 + dx - i_xi k
  RealTensor flux;      // ((d^Sigma)* + i_xi) H_perp
  ResidualReport report(double tol = 1e-7) const;
};
// (<H_perp, H_par>)_a = factor * H_perp^{bc} H_par_{abc}
inline constexpr double kHperpHparFactor = 1.0;
ClassicalConstraints classical_constraints(const HypersurfaceJets& hj);
ClassicalConstraints classical_constraints(const AmbientStructure& amb, const EmbeddingMap& emb,
                                           const std::vector<double>& sigma_point);

// L_X g and d xi - H(X) on the ambient space, plus the induced pair when an
// embedding is supplied.
ResidualReport compatibility_check(const AmbientStructure& amb, const EmbeddingMap* emb,
                                   const std::vector<double>& point, double tol = 1e-8);

}  // namespace gcurv
