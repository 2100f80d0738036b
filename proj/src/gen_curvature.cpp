#include "gcurv/gen_curvature.hpp"

#include <stdexcept>

namespace gcurv {

namespace {

int slot(int band) { return band > 0 ? 0 : 1; }

RealTensor nabla_vector(const Geometry& geo, const JetTensor& V, double t) {
  JetTensor Vu = V;
  Vu.with_variance("u");
  return values(covariant_derivative(Vu, connection(geo, t)));
}

}  // namespace

GenInputs gen_inputs(const Geometry& geo, int chi_dim) {
  GenInputs in;
  in.d = geo.d;
  const int cd = chi_dim > 0 ? chi_dim : geo.d;
  if (cd < 2) throw std::invalid_argument("generalised curvature needs dimension >= 2");
  in.chi_scale = 1.0 / (cd - 1.0);
  in.g = values(geo.g);
  in.ginv = values(geo.ginv);
  in.Rm = values(riemann(geo));
  JetTensor H = geo.H;
  H.with_variance("ddd");
  in.nablaH = values(covariant_derivative(H, connection(geo, Torsion::LeviCivita)));
  HContractions hc = h_contractions(geo);
  in.H2form = hc.H2form;
  in.H = hc.H;
  for (int band : {+1, -1}) {
    const JetTensor& pe = band > 0 ? geo.pe_plus : geo.pe_minus;
    in.pe[slot(band)] = values(pe);
    in.nabla_pe_same[slot(band)] = nabla_vector(geo, pe, band / 6.0);
    in.nabla_pe_opp[slot(band)] = nabla_vector(geo, pe, band / 2.0);
  }
  return in;
}

RealTensor chi_eval(const Geometry& geo, int band) {
  const int d = geo.d;
  RealTensor g = values(geo.g);
  RealTensor Eg = lower(values(band > 0 ? geo.pe_plus : geo.pe_minus), g);
  RealTensor chi = RealTensor::cube(d, 3);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) chi(a, b, c) = g(a, b) * Eg(c) - g(a, c) * Eg(b);
    }
  }
  return chi;
}

namespace {

// g(nabla_c E, z) from (c,k) components.
RealTensor lower_second(const RealTensor& nE, const RealTensor& g) {
  const int d = g.extent(0);
  RealTensor out = RealTensor::cube(d, 2);
  for (int c = 0; c < d; ++c) {
    for (int z = 0; z < d; ++z) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += g(z, k) * nE(c, k);
      out(c, z) = s;
    }
  }
  return out;
}

}  // namespace

RealTensor chi_covariant(const Geometry& geo, int band, bool same_band) {
  const int d = geo.d;
  RealTensor g = values(geo.g);
  const JetTensor& pe = band > 0 ? geo.pe_plus : geo.pe_minus;
  RealTensor gE = lower_second(nabla_vector(geo, pe, same_band ? band / 6.0 : band / 2.0), g);
  RealTensor out = RealTensor::cube(d, 4);
  for (int c = 0; c < d; ++c) {
    for (int a = 0; a < d; ++a) {
      for (int v = 0; v < d; ++v) {
        for (int w = 0; w < d; ++w) out(c, a, v, w) = g(a, v) * gE(c, w) - g(a, w) * gE(c, v);
      }
    }
  }
  return out;
}

GenRiemann gen_riemann(const GenInputs& in) {
  const int d = in.d;
  const RealTensor& g = in.g;
  const RealTensor& Rm = in.Rm;
  const RealTensor& H2 = in.H2form;
  const RealTensor& nH = in.nablaH;
  const double k1 = in.chi_scale;
  GenRiemann out;
  for (int s : {+1, -1}) {
    RealTensor E = in.pe[slot(s)];
    RealTensor Eg = lower(E, g);
    double E2 = 0.0;
    for (int i = 0; i < d; ++i) E2 += E(i) * Eg(i);
    RealTensor gS = lower_second(in.nabla_pe_same[slot(s)], g);
    RealTensor gO = lower_second(in.nabla_pe_opp[slot(s)], g);
    auto C = [&](const RealTensor& gn, int c, int x, int y, int z) {
      return g(x, y) * gn(c, z) - g(x, z) * gn(c, y);
    };

    RealTensor pure = RealTensor::cube(d, 4);
    RealTensor mixed = RealTensor::cube(d, 4);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int v = 0; v < d; ++v) {
          for (int w = 0; w < d; ++w) {
            double p = Rm(a, b, v, w) - H2(a, v, b, w) / 36.0 - H2(b, v, w, a) / 36.0 - H2(v, w, a, b) / 18.0;
            p += s * k1 / 2.0 *
                 (C(gS, v, w, b, a) - C(gS, w, v, b, a) + C(gS, b, a, v, w) - C(gS, a, b, v, w));
            p += k1 * k1 / 2.0 *
                 (2.0 * E2 * (g(w, a) * g(v, b) - g(v, a) * g(w, b)) +
                  Eg(a) * (g(w, b) * Eg(v) - g(v, b) * Eg(w)) + Eg(b) * (g(v, a) * Eg(w) - g(w, a) * Eg(v)));
            pure(a, b, v, w) = s * p;

            double m = Rm(a, b, v, w) - s * 0.5 * nH(a, b, v, w) + s / 6.0 * nH(b, a, v, w) -
                       H2(b, w, a, v) / 12.0 - H2(w, a, b, v) / 12.0 - H2(a, b, v, w) / 6.0 +
                       s * k1 * C(gO, b, a, v, w);
            mixed(a, b, v, w) = s * 0.5 * m;
          }
        }
      }
    }
    if (s > 0) {
      out.pure_plus = pure;
      out.mixed_plus = mixed;
    } else {
      out.pure_minus = pure;
      out.mixed_minus = mixed;
    }
  }
  return out;
}

GenRiemann gen_riemann(const Geometry& geo, int chi_dim) { return gen_riemann(gen_inputs(geo, chi_dim)); }

GenRiemann gen_riemann(const AmbientStructure& amb, const std::vector<double>& point) {
  return gen_riemann(Geometry::at(amb, point));
}

RealTensor assemble_full(const GenRiemann& R) {
  const int d = R.pure_plus.extent(0);
  RealTensor F = RealTensor::cube(2 * d, 4);
  auto off = [d](int s) { return s > 0 ? 0 : d; };
  for (int s : {+1, -1}) {
    const RealTensor& P = R.pure(s);
    const RealTensor& M = R.mixed(s);
    const int o = off(s), u = off(-s);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) {
            F(o + i, o + j, o + k, o + l) = P(i, j, k, l);
            F(o + i, u + j, o + k, o + l) = M(i, j, k, l);
            F(u + i, o + j, o + k, o + l) = -M(j, i, k, l);
            F(o + i, o + j, o + k, u + l) = M(k, l, i, j);
            F(o + i, o + j, u + k, o + l) = -M(l, k, i, j);
          }
        }
      }
    }
  }
  return F;
}

GenRicciMixed ricci_from_riemann(const GenRiemann& R, const RealTensor& ginv) {
  const int d = ginv.extent(0);
  auto trace = [&](const RealTensor& M) {
    RealTensor T = RealTensor::cube(d, 2);
    for (int b = 0; b < d; ++b) {
      for (int w = 0; w < d; ++w) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
          for (int v = 0; v < d; ++v) s += ginv(a, v) * M(a, b, v, w);
        }
        T(b, w) = s;
      }
    }
    return T;
  };
  RealTensor Tp = trace(R.mixed_plus), Tm = trace(R.mixed_minus);
  GenRicciMixed rc;
  rc.rc_plus = RealTensor::cube(d, 2);
  rc.rc_minus = RealTensor::cube(d, 2);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      // Rc(u,v) = g^ij Rm(s+ i, u, s+ j, v) - g^ij Rm(s- i, u, s- j, v)
      rc.rc_plus(a, b) = Tp(a, b) - Tm(b, a);
      rc.rc_minus(a, b) = Tp(b, a) - Tm(a, b);
    }
  }
  return rc;
}

double scalar_from_riemann(const GenRiemann& R, const RealTensor& ginv) {
  const int d = ginv.extent(0);
  auto tt = [&](const RealTensor& P) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int v = 0; v < d; ++v) {
          for (int w = 0; w < d; ++w) s += ginv(a, v) * ginv(b, w) * P(a, b, v, w);
        }
      }
    }
    return s;
  };
  return 0.5 * (tt(R.pure_plus) - tt(R.pure_minus));
}

FrameConnection canonical_frame_connection(const Geometry& geo, int chi_dim) {
  const int d = geo.d;
  const int n = 2 * d;
  const double k = 1.0 / ((chi_dim > 0 ? chi_dim : d) - 1.0);
  FrameConnection fc;
  fc.d = d;
  fc.G = JetTensor::cube(n, 3);
  const RealTensor g = values(geo.g), gi = values(geo.ginv);
  fc.eta = RealTensor::cube(n, 2);
  fc.eta_inv = RealTensor::cube(n, 2);
  fc.gen = RealTensor::cube(n, 2);
  fc.gen_inv = RealTensor::cube(n, 2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      fc.eta(i, j) = fc.gen(i, j) = fc.gen(d + i, d + j) = g(i, j);
      fc.eta(d + i, d + j) = -g(i, j);
      fc.eta_inv(i, j) = fc.gen_inv(i, j) = fc.gen_inv(d + i, d + j) = gi(i, j);
      fc.eta_inv(d + i, d + j) = -gi(i, j);
    }
  }
  for (int s : {+1, -1}) {
    const JetTensor& E = s > 0 ? geo.pe_plus : geo.pe_minus;
    const JetTensor Eg = lower_vector(E, geo.g);
    const int os = s > 0 ? 0 : d;
    for (int c : {+1, -1}) {
      const int oc = c > 0 ? 0 : d;
      const double t = c == s ? s / 6.0 : s / 2.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          for (int m = 0; m < d; ++m) {
            Jet y = geo.gamma(m, i, j) + t * geo.Hup(i, j, m);
            if (c == s) y += k * s * (geo.g(i, j) * E(m) - (i == m ? Eg(j) : Jet(0.0)));
            fc.G(os + m, oc + i, os + j) = y;
          }
        }
      }
    }
  }
  return fc;
}

double metric_divergence(const Geometry& geo, int band) {
  return divergence(band > 0 ? geo.pe_plus : geo.pe_minus, geo).value();
}

double codifferential_xi(const Geometry& geo) {
  JetTensor xi = geo.xi;
  xi.with_variance("d");
  return codifferential(xi, geo)[0].value();
}

GenRicciMixed gen_ricci_mixed(const Geometry& geo) {
  const int d = geo.d;
  const auto lc = connection(geo, Torsion::LeviCivita);
  CurvatureBundle cb = curvature(geo);
  HContractions hc = h_contractions(geo);
  JetTensor H = geo.H;
  H.with_variance("ddd");
  RealTensor dstarH = values(codifferential(H, geo));
  JetTensor xi = geo.xi;
  xi.with_variance("d");
  RealTensor nxi = values(covariant_derivative(xi, lc));
  JetTensor Xl = lower_vector(geo.X, geo.g);
  Xl.with_variance("d");
  RealTensor nX = values(covariant_derivative(Xl, lc));
  RealTensor xiu = values(raise_form(geo.xi, geo.ginv));
  GenRicciMixed rc;
  rc.rc_plus = RealTensor::cube(d, 2);
  rc.rc_minus = RealTensor::cube(d, 2);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      double Hxi = 0.0;
      // H(xi) contracts xi into the middle slot: H(A, g^-1 xi, B).
      for (int k = 0; k < d; ++k) Hxi += xiu(k) * hc.H(a, k, b);
      const double sym = 4.0 * cb.Rc(a, b) - hc.Hsq(a, b) + 2.0 * (nxi(a, b) + nxi(b, a));
      const double anti = -2.0 * dstarH(a, b) + 2.0 * (nX(a, b) - nX(b, a)) + 2.0 * Hxi;
      rc.rc_plus(a, b) = 0.25 * (sym + anti);
      rc.rc_minus(a, b) = 0.25 * (sym - anti);
    }
  }
  return rc;
}

GenRicciMixed gen_ricci_mixed(const AmbientStructure& amb, const std::vector<double>& point) {
  return gen_ricci_mixed(Geometry::at(amb, point));
}

double gen_scalar(const Geometry& geo) {
  CurvatureBundle cb = curvature(geo);
  HContractions hc = h_contractions(geo);
  DilatonSplit ds = dilaton_split(geo);
  return cb.Sc - hc.normH2 / 12.0 + metric_divergence(geo, +1) - metric_divergence(geo, -1) - 0.5 * ds.e_pairing;
}

double gen_scalar(const AmbientStructure& amb, const std::vector<double>& point) {
  return gen_scalar(Geometry::at(amb, point));
}

double dilaton_eom(const Geometry& geo) {
  HContractions hc = h_contractions(geo);
  DilatonSplit ds = dilaton_split(geo);
  return hc.normH2 / 6.0 - codifferential_xi(geo) - 0.5 * ds.e_pairing;
}

double dilaton_eom(const AmbientStructure& amb, const std::vector<double>& point) {
  return dilaton_eom(Geometry::at(amb, point));
}

double mixed_trace_identity(const Geometry& geo) {
  GenRicciMixed rc = gen_ricci_mixed(geo);
  RealTensor gi = values(geo.ginv);
  double tr = 0.0;
  for (int a = 0; a < geo.d; ++a) {
    for (int b = 0; b < geo.d; ++b) tr += gi(a, b) * rc.rc_plus(a, b);
  }
  CurvatureBundle cb = curvature(geo);
  HContractions hc = h_contractions(geo);
  return tr - (cb.Sc - hc.normH2 / 4.0 - codifferential_xi(geo));
}

double mixed_trace_identity(const AmbientStructure& amb, const std::vector<double>& point) {
  return mixed_trace_identity(Geometry::at(amb, point));
}

}  // namespace gcurv
