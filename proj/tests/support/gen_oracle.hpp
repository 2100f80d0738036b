#pragma once

// Brute-force generalised Riemann tensor. The canonical connection is written
// out on the frame f = (sigma_+ d_i, sigma_- d_i) of E, the second covariant
// derivatives are formed from its jet coefficients, and the curvature is
// taken straight from the defining combination
//   Rm(a,b,v,w) = 1/2 { <R(v,w)b, a> + <R(b,a)v, w> - tr <Dv,w><Db,a> }.
// Nothing here goes through the closed-form component formulas.

#include "gcurv/classical.hpp"

namespace oracle {

using gcurv::Geometry;
using gcurv::Jet;
using gcurv::JetTensor;
using gcurv::RealTensor;

struct FrameConnection {
  int d = 0;
  JetTensor G;        // G(M, X, Y): D_{f_X} f_Y = G(M,X,Y) f_M, size (2d)^3
  RealTensor eta;     // <f_A, f_B>
  RealTensor eta_inv;
};

inline FrameConnection frame_connection(const Geometry& geo, int chi_dim = 0) {
  const int d = geo.d;
  const int n = 2 * d;
  const double k = 1.0 / ((chi_dim > 0 ? chi_dim : d) - 1.0);
  FrameConnection fc;
  fc.d = d;
  fc.G = JetTensor::cube(n, 3);
  RealTensor g = values(geo.g), gi = values(geo.ginv);
  fc.eta = RealTensor::cube(n, 2);
  fc.eta_inv = RealTensor::cube(n, 2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      fc.eta(i, j) = g(i, j);
      fc.eta(d + i, d + j) = -g(i, j);
      fc.eta_inv(i, j) = gi(i, j);
      fc.eta_inv(d + i, d + j) = -gi(i, j);
    }
  }
  for (int s : {+1, -1}) {
    const JetTensor& E = s > 0 ? geo.pe_plus : geo.pe_minus;
    JetTensor Eg = gcurv::lower_vector(E, geo.g);
    const int os = s > 0 ? 0 : d;
    for (int c : {+1, -1}) {
      const int oc = c > 0 ? 0 : d;
      const double t = c == s ? s / 6.0 : s / 2.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          for (int m = 0; m < d; ++m) {
            Jet y = geo.gamma(m, i, j) + t * geo.Hup(i, j, m);
            if (c == s) {
              // chi(a,b) = <a,b> e_s - a <e_s,b>, with <,> = s g on E_s.
              y += k * s * (geo.g(i, j) * E(m) - (i == m ? Eg(j) : Jet(0.0)));
            }
            fc.G(os + m, oc + i, os + j) = y;
          }
        }
      }
    }
  }
  return fc;
}

inline RealTensor brute_force_riemann(const Geometry& geo, int chi_dim = 0) {
  FrameConnection fc = frame_connection(geo, chi_dim);
  const int d = fc.d;
  const int n = 2 * d;
  RealTensor G = values(fc.G);
  // Q(X,Y,Z)^M = d_{pi X} G(M,Y,Z) + G(K,Y,Z) G(M,X,K) - G(K,X,Y) G(M,K,Z)
  RealTensor Q = RealTensor::cube(n, 4);  // (M, X, Y, Z)
  for (int M = 0; M < n; ++M) {
    for (int X = 0; X < n; ++X) {
      const int dir = X % d;
      for (int Y = 0; Y < n; ++Y) {
        for (int Z = 0; Z < n; ++Z) {
          double s = fc.G(M, Y, Z).d(dir);
          for (int K = 0; K < n; ++K) s += G(K, Y, Z) * G(M, X, K) - G(K, X, Y) * G(M, K, Z);
          Q(M, X, Y, Z) = s;
        }
      }
    }
  }
  auto R = [&](int M, int x, int y, int z) { return Q(M, x, y, z) - Q(M, y, x, z); };
  // <D_C v, w> for all C, v, w.
  RealTensor Dvw = RealTensor::cube(n, 3);
  for (int C = 0; C < n; ++C) {
    for (int v = 0; v < n; ++v) {
      for (int w = 0; w < n; ++w) {
        double s = 0.0;
        for (int M = 0; M < n; ++M) s += G(M, C, v) * fc.eta(M, w);
        Dvw(C, v, w) = s;
      }
    }
  }
  RealTensor Rm = RealTensor::cube(n, 4);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
          double t1 = 0.0, t2 = 0.0, t3 = 0.0;
          for (int M = 0; M < n; ++M) {
            t1 += R(M, v, w, b) * fc.eta(M, a);
            t2 += R(M, b, a, v) * fc.eta(M, w);
          }
          for (int C = 0; C < n; ++C) {
            for (int C2 = 0; C2 < n; ++C2) {
              if (fc.eta_inv(C, C2) == 0.0) continue;
              t3 += fc.eta_inv(C, C2) * Dvw(C, v, w) * Dvw(C2, b, a);
            }
          }
          Rm(a, b, v, w) = 0.5 * (t1 + t2 - t3);
        }
      }
    }
  }
  return Rm;
}

}  // namespace oracle
