#pragma once

#include "gcurv/fields.hpp"

namespace gcurv {

// Connection flavours built from the Levi-Civita connection and H:
// nabla^t_i d_j = (Gamma^k_ij + t g^kl H_ijl) d_k.
enum class Torsion { LeviCivita, Plus, Minus, PlusThird, MinusThird };

double torsion_coefficient(Torsion t);
const char* torsion_name(Torsion t);

struct ConnectionCoefficients {
  JetTensor gamma;  // (k, i, j): nabla_i d_j = gamma(k,i,j) d_k
  Torsion torsion = Torsion::LeviCivita;
  double t = 0.0;
};

ConnectionCoefficients connection(const Geometry& geo, Torsion torsion);
ConnectionCoefficients connection(const Geometry& geo, double t);
// Jet order of the returned coefficients is capped at `order`; the fields are
// evaluated one order higher.
ConnectionCoefficients christoffels(const AmbientStructure& amb, const std::vector<double>& point, int order = 2,
                                    Torsion torsion = Torsion::LeviCivita);

// Rm_abcd = g(R(d_c, d_d) d_b, d_a) as jets (order drops by one from Gamma).
JetTensor riemann(const Geometry& geo);

struct CurvatureBundle {
  RealTensor Rm, Rc, Z, S, E, Weyl;
  double Sc = 0.0;
};
CurvatureBundle curvature_from_riemann(const RealTensor& Rm, const RealTensor& g, const RealTensor& ginv);
CurvatureBundle curvature(const Geometry& geo);
CurvatureBundle curvature(const AmbientStructure& amb, const std::vector<double>& point);

// Covariant derivative of a jet tensor, derivative index first. Index types
// come from T's variance string.
JetTensor covariant_derivative(const JetTensor& T, const ConnectionCoefficients& conn);

// (d* w)_{j...} = -g^{ic} (nabla w)_{c i j...} with the Levi-Civita connection.
JetTensor codifferential(const JetTensor& omega, const Geometry& geo);

// (L_X g)_ij = nabla_i X_j + nabla_j X_i.
JetTensor lie_derivative_metric(const JetTensor& X, const Geometry& geo);

// Divergence tr(nabla V) of a vector field (Levi-Civita).
Jet divergence(const JetTensor& V, const Geometry& geo);

// Index gymnastics on jets.
JetTensor lower_vector(const JetTensor& V, const JetTensor& g);
JetTensor raise_form(const JetTensor& w, const JetTensor& ginv);

}  // namespace gcurv
