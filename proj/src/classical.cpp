#include "gcurv/classical.hpp"

#include <stdexcept>

namespace gcurv {

double torsion_coefficient(Torsion t) {
  switch (t) {
    case Torsion::LeviCivita: return 0.0;
    case Torsion::Plus: return 0.5;
    case Torsion::Minus: return -0.5;
    case Torsion::PlusThird: return 1.0 / 6.0;
    case Torsion::MinusThird: return -1.0 / 6.0;
  }
  return 0.0;
}

const char* torsion_name(Torsion t) {
  switch (t) {
    case Torsion::LeviCivita: return "levi_civita";
    case Torsion::Plus: return "plus";
    case Torsion::Minus: return "minus";
    case Torsion::PlusThird: return "plus_third";
    case Torsion::MinusThird: return "minus_third";
  }
  return "?";
}

ConnectionCoefficients connection(const Geometry& geo, double t) {
  ConnectionCoefficients c;
  c.t = t;
  c.gamma = geo.gamma;
  if (t != 0.0) {
    const int d = geo.d;
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) c.gamma(k, i, j) += t * geo.Hup(i, j, k);
      }
    }
  }
  c.gamma.with_variance("udd");
  return c;
}

ConnectionCoefficients connection(const Geometry& geo, Torsion torsion) {
  ConnectionCoefficients c = connection(geo, torsion_coefficient(torsion));
  c.torsion = torsion;
  return c;
}

ConnectionCoefficients christoffels(const AmbientStructure& amb, const std::vector<double>& point, int order,
                                    Torsion torsion) {
  if (order < 0 || order > kJetOrder - 1) {
    throw std::invalid_argument("christoffels: jet order must lie in 0.." + std::to_string(kJetOrder - 1));
  }
  Geometry geo = Geometry::from_fields(evaluate_fields(amb, point, order + 1), std::make_pair(amb.g.p, amb.g.q));
  return connection(geo, torsion);
}

JetTensor riemann(const Geometry& geo) {
  const int d = geo.d;
  const JetTensor& G = geo.gamma;
  std::vector<JetTensor> dG(d);
  for (int c = 0; c < d; ++c) dG[c] = partial(G, c);
  // R^a_bcd
  JetTensor R = JetTensor::cube(d, 4);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = c + 1; e < d; ++e) {
          Jet s = dG[c](a, e, b) - dG[e](a, c, b);
          for (int f = 0; f < d; ++f) s += G(a, c, f) * G(f, e, b) - G(a, e, f) * G(f, c, b);
          R(a, b, c, e) = s;
          R(a, b, e, c) = -s;
        }
      }
    }
  }
  JetTensor Rm = JetTensor::cube(d, 4);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          Jet s(0.0);
          for (int f = 0; f < d; ++f) s += geo.g(a, f) * R(f, b, c, e);
          Rm(a, b, c, e) = s;
        }
      }
    }
  }
  return Rm;
}

CurvatureBundle curvature_from_riemann(const RealTensor& Rm, const RealTensor& g, const RealTensor& gi) {
  const int d = g.extent(0);
  CurvatureBundle cb;
  cb.Rm = Rm;
  cb.Rc = RealTensor::cube(d, 2);
  for (int b = 0; b < d; ++b) {
    for (int e = 0; e < d; ++e) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) s += gi(a, c) * Rm(a, b, c, e);
      }
      cb.Rc(b, e) = s;
    }
  }
  double sc = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) sc += gi(a, b) * cb.Rc(a, b);
  }
  cb.Sc = sc;
  cb.Z = RealTensor::cube(d, 2);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) cb.Z(a, b) = cb.Rc(a, b) - sc / d * g(a, b);
  }
  cb.S = RealTensor::cube(d, 4);
  cb.E = RealTensor::cube(d, 4);
  cb.Weyl = RealTensor::cube(d, 4);
  const double s_coef = d > 1 ? sc / (d * (d - 1.0)) : 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int e = 0; e < d; ++e) {
          cb.S(a, b, c, e) = s_coef * (g(a, c) * g(b, e) - g(a, e) * g(b, c));
          if (d > 2) {
            cb.E(a, b, c, e) = (cb.Z(a, c) * g(b, e) + cb.Z(b, e) * g(a, c) - cb.Z(a, e) * g(b, c) -
                                cb.Z(b, c) * g(a, e)) / (d - 2.0);
          }
          cb.Weyl(a, b, c, e) = Rm(a, b, c, e) - cb.S(a, b, c, e) - cb.E(a, b, c, e);
        }
      }
    }
  }
  // In two dimensions Rm is pure scalar curvature; the remainder is rounding.
  if (d == 2) cb.Weyl = RealTensor::cube(d, 4);
  return cb;
}

CurvatureBundle curvature(const Geometry& geo) {
  return curvature_from_riemann(values(riemann(geo)), values(geo.g), values(geo.ginv));
}

CurvatureBundle curvature(const AmbientStructure& amb, const std::vector<double>& point) {
  return curvature(Geometry::at(amb, point));
}

JetTensor covariant_derivative(const JetTensor& T, const ConnectionCoefficients& conn) {
  const int d = conn.gamma.extent(0);
  const int r = T.rank();
  std::vector<int> shape(r + 1, d);
  JetTensor out(shape);
  out.with_variance("d" + T.variance());
  const std::string& var = T.variance();
  std::vector<JetTensor> dT(d);
  for (int c = 0; c < d; ++c) dT[c] = partial(T, c);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::vector<int> idx = out.unflatten(flat);
    const int c = idx[0];
    std::vector<int> tidx(idx.begin() + 1, idx.end());
    Jet s = r == 0 ? dT[c][0] : dT[c].at(tidx);
    for (int p = 0; p < r; ++p) {
      const int orig = tidx[p];
      for (int e = 0; e < d; ++e) {
        tidx[p] = e;
        if (var[p] == 'u') {
          s += conn.gamma(orig, c, e) * T.at(tidx);
        } else {
          s -= conn.gamma(e, c, orig) * T.at(tidx);
        }
      }
      tidx[p] = orig;
    }
    out[flat] = s;
  }
  return out;
}

JetTensor codifferential(const JetTensor& omega, const Geometry& geo) {
  const int r = omega.rank();
  if (r < 1) throw std::invalid_argument("codifferential needs a form of degree >= 1");
  const int d = geo.d;
  JetTensor nab = covariant_derivative(omega, connection(geo, Torsion::LeviCivita));
  std::vector<int> shape(r - 1, d);
  JetTensor out(shape);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::vector<int> rest = r > 1 ? out.unflatten(flat) : std::vector<int>{};
    Jet s(0.0);
    for (int c = 0; c < d; ++c) {
      for (int i = 0; i < d; ++i) {
        std::vector<int> idx = {c, i};
        idx.insert(idx.end(), rest.begin(), rest.end());
        s -= geo.ginv(i, c) * nab.at(idx);
      }
    }
    out[flat] = s;
  }
  return out;
}

JetTensor lower_vector(const JetTensor& V, const JetTensor& g) {
  const int d = g.extent(0);
  JetTensor w = JetTensor::cube(d, 1);
  for (int i = 0; i < d; ++i) {
    Jet s(0.0);
    for (int j = 0; j < d; ++j) s += g(i, j) * V(j);
    w(i) = s;
  }
  return w;
}

JetTensor raise_form(const JetTensor& w, const JetTensor& ginv) {
  JetTensor V = lower_vector(w, ginv);
  V.with_variance("u");
  return V;
}

JetTensor lie_derivative_metric(const JetTensor& X, const Geometry& geo) {
  const int d = geo.d;
  JetTensor Xl = lower_vector(X, geo.g);
  JetTensor nab = covariant_derivative(Xl, connection(geo, Torsion::LeviCivita));
  JetTensor L = JetTensor::cube(d, 2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) L(i, j) = nab(i, j) + nab(j, i);
  }
  return L;
}

Jet divergence(const JetTensor& V, const Geometry& geo) {
  JetTensor Vu = V;
  Vu.with_variance("u");
  JetTensor nab = covariant_derivative(Vu, connection(geo, Torsion::LeviCivita));
  Jet s(0.0);
  for (int i = 0; i < geo.d; ++i) s += nab(i, i);
  return s;
}

}  // namespace gcurv
