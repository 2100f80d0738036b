#pragma once

#include "gcurv/classical.hpp"

namespace gcurv {

// All E_pm-valued objects are stored as TM tensors through sigma_pm. Band
// indices are +1 / -1.
struct GenRiemann {
  RealTensor pure_plus, pure_minus;    // Rm^D(s a, s b, s v, s w)
  RealTensor mixed_plus, mixed_minus;  // Rm^D(s a, -s b, s v, s w)

  const RealTensor& pure(int band) const { return band > 0 ? pure_plus : pure_minus; }
  const RealTensor& mixed(int band) const { return band > 0 ? mixed_plus : mixed_minus; }
};

struct GenRicciMixed {
  RealTensor rc_plus;   // Rc(sigma_- A, sigma_+ B)
  RealTensor rc_minus;  // Rc(sigma_+ A, sigma_- B)
};

// Pointwise ingredients shared by the generalised curvature formulas.
struct GenInputs {
  int d = 0;
  double chi_scale = 0.0;  // 1/(chi_dim - 1)
  RealTensor g, ginv, Rm, nablaH, H2form, H;
  RealTensor pe[2];             // index 0: band +, 1: band -
  RealTensor nabla_pe_same[2];  // (c, k) = (nabla^{s/6}_c pi e_s)^k
  RealTensor nabla_pe_opp[2];   // (c, k) = (nabla^{s/2}_c pi e_s)^k
};

// chi_dim is the dimension entering the 1/(dim-1) chi coupling. It equals
// geo.d for an ambient structure; the connection induced on a hypersurface
// keeps the ambient value (pass 0 for geo.d).
GenInputs gen_inputs(const Geometry& geo, int chi_dim = 0);

// chi^{e_s}(a,b,c) = g(a,b) g(pi e_s, c) - g(a,c) g(pi e_s, b).
RealTensor chi_eval(const Geometry& geo, int band);
// [D^0_c chi^{e_s}](a,v,w), stored (c, a, v, w). same_band selects
// nabla^{s/6} for the direction, otherwise nabla^{s/2}.
RealTensor chi_covariant(const Geometry& geo, int band, bool same_band);

GenRiemann gen_riemann(const GenInputs& in);
GenRiemann gen_riemann(const Geometry& geo, int chi_dim = 0);
GenRiemann gen_riemann(const AmbientStructure& amb, const std::vector<double>& point);

// Full tensor on the 2d-dimensional frame (sigma_+ d_i, sigma_- d_i); frame
// index is band_offset + i with band_offset 0 for + and d for -.
RealTensor assemble_full(const GenRiemann& R);

// Mixed Ricci obtained by tracing the generalised Riemann tensor.
GenRicciMixed ricci_from_riemann(const GenRiemann& R, const RealTensor& ginv);
double scalar_from_riemann(const GenRiemann& R, const RealTensor& ginv);

// Closed forms in terms of Rc, H, X, xi.
GenRicciMixed gen_ricci_mixed(const Geometry& geo);
GenRicciMixed gen_ricci_mixed(const AmbientStructure& amb, const std::vector<double>& point);
double gen_scalar(const Geometry& geo);
double gen_scalar(const AmbientStructure& amb, const std::vector<double>& point);

double dilaton_eom(const Geometry& geo);
double dilaton_eom(const AmbientStructure& amb, const std::vector<double>& point);
double mixed_trace_identity(const Geometry& geo);
double mixed_trace_identity(const AmbientStructure& amb, const std::vector<double>& point);

// Canonical connection written on the frame f = (sigma_+ d_i, sigma_- d_i) of
// E, frame index band_offset + i as in assemble_full. D_{f_X} f_Y =
// G(M, X, Y) f_M and pi f_X = d_{X mod d}.
struct FrameConnection {
  int d = 0;
  JetTensor G;
  RealTensor eta, eta_inv;  // <f_A, f_B>
  RealTensor gen, gen_inv;  // generalised metric G(f_A, f_B)
};
FrameConnection canonical_frame_connection(const Geometry& geo, int chi_dim = 0);

// Pieces reused by the flatness and hypersurface modules.
double metric_divergence(const Geometry& geo, int band);  // tr nabla(pi e_s)
double codifferential_xi(const Geometry& geo);            // d* xi

}  // namespace gcurv
