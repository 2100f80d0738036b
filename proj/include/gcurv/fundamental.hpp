#pragma once

#include <functional>

#include "gcurv/hypersurface.hpp"

namespace gcurv {

// Abstract hypersurface data on a chart of dimension m = d - 1, not coming
// from an embedding. `sigma` carries (h, H_Sigma, e_Sigma) as an ordinary
// structure on the chart.
struct HypersurfaceData {
  AmbientStructure sigma;
  std::vector<std::vector<Expr>> k;       // symmetric
  std::vector<std::vector<Expr>> H_perp;  // antisymmetric, empty = 0
  Expr e_perp_plus, e_perp_minus;         // <e, n_+>, <e, n_->
  double epsilon = 1.0;                   // g(n, n) in the would-be ambient space

  int dim() const { return sigma.dim(); }

  // Classical data (h, k) with H and e zero. h is Riemannian.
  static HypersurfaceData classical(const Chart& chart, const std::vector<std::vector<std::string>>& h,
                                    const std::vector<std::vector<std::string>>& k);
};

// The generalised second fundamental form assembled from the data as if it
// were induced, with the ambient space taken flat.
HypersurfaceJets hypersurface_jets(const HypersurfaceData& data, const std::vector<double>& point);

// Gauss and Codazzi identities with Rm^D of the ambient space set to zero.
ResidualReport flat_gc_residual(const HypersurfaceData& data, const std::vector<double>& point, double tol = 1e-7);

struct ClassicalGC {
  double gauss = 0.0;    // max |Rm_h(A,B,V,W) - k(A,V)k(B,W) + k(A,W)k(B,V)|
  double codazzi = 0.0;  // max |(nabla_A k)(B,C) - (nabla_B k)(A,C)|
};
ClassicalGC classical_flat_gc_residual(const HypersurfaceData& data, const std::vector<double>& point);

// Axis-aligned rectangle in a 2-chart sampled by n x n points.
struct GridSpec {
  double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
  int n = 33;

  double du() const { return (u1 - u0) / (n - 1); }
  double dv() const { return (v1 - v0) / (n - 1); }
  std::vector<double> at(int i, int j) const { return {u0 + i * du(), v0 + j * dv()}; }
};

// Columns: images of d_u, d_v and of the unit normal; orthonormal for h + 1.
using Frame3 = std::array<std::array<double, 3>, 3>;  // [column][row]

struct Immersion {
  GridSpec grid;
  std::vector<std::array<double, 3>> F;  // index i * n + j
  std::vector<Frame3> frame;
  double path_residual = 0.0;    // rows-first against columns-first
  double metric_residual = 0.0;  // max |<dF_a, dF_b> - h_ab|
  double max_gc_residual = 0.0;  // precondition check over the grid

  const std::array<double, 3>& point(int i, int j) const { return F[i * grid.n + j]; }
};

inline constexpr double kReconstructionGcTol = 1e-6;

// Integrates the flat connection nabla^Sigma - k n, A on Sigma x R along grid
// lines with RK4 (step = grid spacing) and the position F along with it.
// Only (h, k) are used. Throws "data not flat-compatible" when the classical
// Gauss or Codazzi residual exceeds kReconstructionGcTol at a grid point.
Immersion reconstruct_immersion(const HypersurfaceData& data, const GridSpec& grid);

// RMS distance after the best rigid motion (orthogonal Procrustes without
// reflection) taking `points` onto `reference`.
double procrustes_rms(const std::vector<std::array<double, 3>>& points,
                      const std::vector<std::array<double, 3>>& reference);

// Second fundamental form of the reconstructed surface at interior grid node
// (i, j), from fourth-order differences of F and the cross-product normal.
RealTensor grid_second_fundamental_form(const Immersion& im, int i, int j);

}  // namespace gcurv
