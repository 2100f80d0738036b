#include "gcurv/hypersurface.hpp"

#include <algorithm>
#include <cmath>

namespace gcurv {

namespace {

int slot(int band) { return band > 0 ? 0 : 1; }

JetTensor compose(const JetTensor& t, const JetComposer& c) {
  return t.map([&c](const Jet& j) { return c(j); });
}

// Determinant by elimination with pivoting on the base values.
Jet jet_det(std::vector<std::vector<Jet>> M) {
  const int n = static_cast<int>(M.size());
  Jet det(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(M[r][c].value()) > std::fabs(M[piv][c].value())) piv = r;
    if (M[piv][c].value() == 0.0) return Jet::zero(M[0][0].dim(), M[0][0].order()) * 0.0;
    if (piv != c) {
      std::swap(M[piv], M[c]);
      det = -det;
    }
    det *= M[c][c];
    const Jet inv = reciprocal(M[c][c]);
    for (int r = c + 1; r < n; ++r) {
      if (M[r][c].value() == 0.0 && M[r][c].is_constant()) continue;
      const Jet f = M[r][c] * inv;
      for (int k = c; k < n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  return det;
}

Jet jet_sign_sqrt_inv(const Jet& N) {
  // 1 / sqrt(|N|)
  return reciprocal(sqrt(N.value() < 0 ? -N : N));
}

// Objects on the frame f = (sigma_+ d_a, sigma_- d_a) of E_Sigma, frame index
// band_offset + a with offset 0 for + and m for -.
struct SigmaFrame {
  int m = 0, N = 0;
  double eps = 1.0;
  FrameConnection fc;
  JetTensor Ginv;     // generalised metric inverse as jets
  JetTensor K[2];     // K^{n_s}(f_X, f_Y)
  JetTensor L[2];     // L^s(f_X)
  RealTensor Kv[2], Lv[2];
  RealTensor A[2];    // (M, X) = (A^{n_s} f_X)^M
  RealTensor DK[2];   // (C, X, Y) = [D^Sigma_{f_C} K^{n_s}](f_X, f_Y)
  RealTensor DL[2];   // (C, X)
  RealTensor Rm;      // ambient Rm^D on the lifts [f_0..f_{N-1}, n_+, n_-, n_+ - n_-]
  RealTensor RmS;     // Rm^{D^Sigma} on the frame

  int off(int s) const { return s > 0 ? 0 : m; }
  int np() const { return N; }
  int nm() const { return N + 1; }
  int ndiff() const { return N + 2; }
};

RealTensor contract_lift(const RealTensor& R, const RealTensor& P) {
  // R'(I,J,K,L) = R(a,b,c,e) P(a,I) P(b,J) P(c,K) P(e,L), one slot at a time.
  const int n = P.extent(0), q = P.extent(1);
  RealTensor cur = R;
  std::vector<int> shape = {n, n, n, n};
  for (int slot_i = 0; slot_i < 4; ++slot_i) {
    std::vector<int> out_shape = shape;
    out_shape[slot_i] = q;
    RealTensor out(out_shape);
    for (std::size_t k = 0; k < out.size(); ++k) {
      std::vector<int> idx = out.unflatten(k);
      const int I = idx[slot_i];
      double s = 0.0;
      for (int a = 0; a < n; ++a) {
        const double p = P(a, I);
        if (p == 0.0) continue;
        idx[slot_i] = a;
        s += cur.at(idx) * p;
      }
      out[k] = s;
    }
    cur = out;
    shape = out_shape;
  }
  return cur;
}

SigmaFrame build_frame(const HypersurfaceJets& hj) {
  SigmaFrame F;
  const int m = hj.m, N = 2 * m, d = hj.d;
  F.m = m;
  F.N = N;
  F.eps = hj.epsilon;
  F.fc = canonical_frame_connection(hj.sigma, d);
  F.Ginv = JetTensor::cube(N, 2);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) F.Ginv(a, b) = F.Ginv(m + a, m + b) = hj.sigma.ginv(a, b);

  for (int s : {+1, -1}) {
    const int i = slot(s), os = F.off(s), oo = F.off(-s);
    JetTensor K = JetTensor::cube(N, 2);
    JetTensor L({N});
    for (int a = 0; a < m; ++a) {
      L(os + a) = hj.L[i](a);
      for (int b = 0; b < m; ++b) {
        K(os + a, os + b) = hj.K_pure[i](a, b);
        K(oo + a, os + b) = hj.K_mixed[i](a, b);
      }
    }
    F.K[i] = K;
    F.L[i] = L;
    F.Kv[i] = values(K);
    F.Lv[i] = values(L);
  }

  const RealTensor G = values(F.fc.G);
  const RealTensor& Gi = F.fc.gen_inv;
  for (int s : {+1, -1}) {
    const int i = slot(s);
    const RealTensor& K = F.Kv[i];
    F.A[i] = RealTensor::cube(N, 2);
    for (int M = 0; M < N; ++M)
      for (int X = 0; X < N; ++X) {
        double v = 0.0;
        for (int Y = 0; Y < N; ++Y) v += Gi(M, Y) * K(X, Y);
        F.A[i](M, X) = v;
      }
    F.DK[i] = RealTensor::cube(N, 3);
    F.DL[i] = RealTensor::cube(N, 2);
    for (int C = 0; C < N; ++C) {
      const int dir = C % m;
      for (int X = 0; X < N; ++X) {
        double dl = F.L[i](X).d(dir);
        for (int M = 0; M < N; ++M) dl -= G(M, C, X) * F.Lv[i](M);
        F.DL[i](C, X) = dl;
        for (int Y = 0; Y < N; ++Y) {
          double dk = F.K[i](X, Y).d(dir);
          for (int M = 0; M < N; ++M) dk -= G(M, C, X) * K(M, Y) + G(M, C, Y) * K(X, M);
          F.DK[i](C, X, Y) = dk;
        }
      }
    }
  }

  F.RmS = assemble_full(gen_riemann(hj.sigma, d));
  if (hj.flat_ambient) {
    F.Rm = RealTensor::cube(N + 3, 4);
    return F;
  }

  // Lifts of the E_Sigma frame and of the normals into the ambient frame.
  const RealTensor Ev = values(hj.E), nv = values(hj.n);
  RealTensor P({2 * d, N + 3});
  for (int mu = 0; mu < d; ++mu) {
    for (int a = 0; a < m; ++a) {
      P(mu, a) = Ev(mu, a);
      P(d + mu, m + a) = Ev(mu, a);
    }
    P(mu, N) = nv(mu);
    P(d + mu, N + 1) = nv(mu);
    P(mu, N + 2) = nv(mu);
    P(d + mu, N + 2) = -nv(mu);
  }
  F.Rm = contract_lift(assemble_full(gen_riemann(hj.ambient)), P);
  return F;
}

void require_order(const Jet& j, int need, const char* what) {
  if (j.order() < need) throw GeometryError(std::string("insufficient jet order for ") + what);
}

}  // namespace

EmbeddingMap EmbeddingMap::from_strings(Chart sigma_chart, const std::vector<std::string>& components,
                                        int orientation) {
  sigma_chart.validate();
  if (orientation != 1 && orientation != -1) throw GeometryError("normal orientation must be +1 or -1");
  EmbeddingMap e;
  e.orientation = orientation;
  for (const auto& c : components) e.F.push_back(parse(c, sigma_chart.coords));
  e.sigma_chart = std::move(sigma_chart);
  return e;
}

std::vector<double> EmbeddingMap::image(const std::vector<double>& sigma_point) const {
  std::vector<double> out;
  out.reserve(F.size());
  for (const auto& f : F) out.push_back(f.value(sigma_point));
  return out;
}

HypersurfaceJets hypersurface_jets(const AmbientStructure& amb, const EmbeddingMap& emb,
                                   const std::vector<double>& sigma_point) {
  const int d = amb.dim();
  const int m = emb.sigma_chart.dim();
  if (static_cast<int>(emb.F.size()) != d) throw GeometryError("embedding needs one component per ambient coordinate");
  if (m != d - 1) throw GeometryError("hypersurface chart must have dimension d - 1");
  if (m < 2) throw GeometryError("hypersurface must have dimension at least 2");
  if (static_cast<int>(sigma_point.size()) != m) throw GeometryError("hypersurface point has wrong dimension");
  if (!emb.sigma_chart.contains(sigma_point))
    throw GeometryError("point outside the domain of chart '" + emb.sigma_chart.name + "'");

  HypersurfaceJets hj;
  hj.d = d;
  hj.m = m;
  hj.sigma_point = sigma_point;

  std::vector<Jet> Fj;
  for (const auto& f : emb.F) Fj.push_back(f.eval(sigma_point, kJetOrder));
  for (const auto& j : Fj) hj.ambient_point.push_back(j.value());
  FieldJets amb_f = evaluate_fields(amb, hj.ambient_point);
  hj.ambient = Geometry::from_fields(amb_f, std::make_pair(amb.g.p, amb.g.q));
  const Geometry& G = hj.ambient;

  JetComposer comp(Fj);
  const JetTensor g = compose(G.g, comp);
  const JetTensor gi = compose(G.ginv, comp);
  const JetTensor gamma = compose(G.gamma, comp);
  const JetTensor H = compose(G.H, comp);
  const JetTensor X = compose(G.X, comp);
  const JetTensor xi = compose(G.xi, comp);
  hj.pe_amb[0] = compose(G.pe_plus, comp);
  hj.pe_amb[1] = compose(G.pe_minus, comp);

  hj.E = JetTensor({d, m});
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < m; ++a) hj.E(mu, a) = Fj[mu].partial(a);

  // Cofactor covector nu(V) = det[d_1 F, ..., d_m F, V].
  JetTensor nu({d});
  for (int mu = 0; mu < d; ++mu) {
    std::vector<std::vector<Jet>> M(d, std::vector<Jet>(d));
    for (int r = 0; r < d; ++r) {
      for (int a = 0; a < m; ++a) M[r][a] = hj.E(r, a);
      M[r][m] = Jet(r == mu ? 1.0 : 0.0);
    }
    nu(mu) = jet_det(M);
  }
  double nu_e = 0.0;
  for (int mu = 0; mu < d; ++mu) nu_e += nu(mu).value() * nu(mu).value();
  if (nu_e == 0.0) throw GeometryError("embedding Jacobian does not have full rank");
  Jet NN(0.0);
  for (int mu = 0; mu < d; ++mu)
    for (int nn = 0; nn < d; ++nn) NN += gi(mu, nn) * nu(mu) * nu(nn);
  if (std::fabs(NN.value()) / nu_e < kNullNormalTol) throw GeometryError("null hypersurface unsupported");
  hj.epsilon = NN.value() > 0 ? 1.0 : -1.0;
  const Jet scale = hj.epsilon * emb.orientation * jet_sign_sqrt_inv(NN);
  hj.n = JetTensor({d});
  for (int mu = 0; mu < d; ++mu) {
    Jet s(0.0);
    for (int nn = 0; nn < d; ++nn) s += gi(mu, nn) * nu(nn);
    hj.n(mu) = scale * s;
  }
  hj.n.with_variance("u");
  JetTensor nflat({d});
  for (int mu = 0; mu < d; ++mu) {
    Jet s(0.0);
    for (int nn = 0; nn < d; ++nn) s += g(mu, nn) * hj.n(nn);
    nflat(mu) = s;
  }

  // h, k, H_par, H_perp, X_par, xi_par, x.
  JetTensor h = JetTensor::cube(m, 2);
  JetTensor gE({d, m});  // g(d_mu, E_a)
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < m; ++a) {
      Jet s(0.0);
      for (int nn = 0; nn < d; ++nn) s += g(mu, nn) * hj.E(nn, a);
      gE(mu, a) = s;
    }
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Jet s(0.0);
      for (int mu = 0; mu < d; ++mu) s += hj.E(mu, a) * gE(mu, b);
      h(a, b) = h(b, a) = s;
    }
  hj.k = JetTensor::cube(m, 2);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      Jet s(0.0);
      for (int mu = 0; mu < d; ++mu) {
        Jet acc = Fj[mu].partial(a).partial(b);
        for (int nn = 0; nn < d; ++nn)
          for (int r = 0; r < d; ++r) acc += gamma(mu, nn, r) * hj.E(nn, a) * hj.E(r, b);
        s -= nflat(mu) * acc;
      }
      hj.k(a, b) = hj.k(b, a) = s;
    }

  // H with its first slot fed by the vectors n, E_a.
  auto H_on = [&](const std::vector<Jet>& u, const std::vector<Jet>& v, const std::vector<Jet>& w) {
    Jet s(0.0);
    for (int i = 0; i < d; ++i) {
      if (u[i].value() == 0.0 && u[i].is_constant()) continue;
      for (int j = 0; j < d; ++j) {
        if (v[j].value() == 0.0 && v[j].is_constant()) continue;
        Jet uv = u[i] * v[j];
        for (int k = 0; k < d; ++k) s += uv * w[k] * H(i, j, k);
      }
    }
    return s;
  };
  std::vector<std::vector<Jet>> Ecol(m, std::vector<Jet>(d));
  std::vector<Jet> ncol(d);
  for (int mu = 0; mu < d; ++mu) {
    ncol[mu] = hj.n(mu);
    for (int a = 0; a < m; ++a) Ecol[a][mu] = hj.E(mu, a);
  }
  JetTensor Hpar = JetTensor::cube(m, 3);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c) {
        const Jet v = H_on(Ecol[a], Ecol[b], Ecol[c]);
        Hpar(a, b, c) = Hpar(b, c, a) = Hpar(c, a, b) = v;
        Hpar(b, a, c) = Hpar(a, c, b) = Hpar(c, b, a) = -v;
      }
  hj.H_perp = JetTensor::cube(m, 2);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const Jet v = H_on(ncol, Ecol[a], Ecol[b]);
      hj.H_perp(a, b) = v;
      hj.H_perp(b, a) = -v;
    }

  FieldJets sf;
  sf.dim = m;
  sf.g = h;
  sf.H = Hpar;
  JetTensor hinv = inverse(h);
  JetTensor gX({m});
  sf.xi = JetTensor({m});
  for (int a = 0; a < m; ++a) {
    Jet s(0.0), t(0.0);
    for (int mu = 0; mu < d; ++mu) {
      s += X(mu) * gE(mu, a);
      t += xi(mu) * hj.E(mu, a);
    }
    gX(a) = s;
    sf.xi(a) = t;
  }
  sf.X = JetTensor({m});
  for (int a = 0; a < m; ++a) {
    Jet s(0.0);
    for (int b = 0; b < m; ++b) s += hinv(a, b) * gX(b);
    sf.X(a) = s;
  }
  try {
    hj.sigma = Geometry::from_fields(sf);
  } catch (const GeometryError& e) {
    throw GeometryError(std::string("degenerate induced metric: ") + e.what());
  }

  hj.x = Jet(0.0);
  for (int mu = 0; mu < d; ++mu) hj.x += xi(mu) * hj.n(mu);

  // <e, n_s> = s g(pi e_s, n)
  for (int s : {+1, -1}) {
    Jet gpn(0.0);
    for (int mu = 0; mu < d; ++mu) gpn += hj.pe_amb[slot(s)](mu) * nflat(mu);
    hj.e_perp[slot(s)] = s * gpn;
  }
  fill_shape_blocks(hj);
  return hj;
}

void fill_shape_blocks(HypersurfaceJets& hj) {
  const int m = hj.m, d = hj.d;
  const JetTensor& h = hj.sigma.g;
  const JetTensor& hinv = hj.sigma.ginv;
  Jet trk(0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) trk += hinv(a, b) * hj.k(a, b);
  for (int s : {+1, -1}) {
    const int i = slot(s);
    hj.T[i] = trk - hj.e_perp[i];
    hj.K_pure[i] = JetTensor::cube(m, 2);
    hj.K_mixed[i] = JetTensor::cube(m, 2);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        hj.K_pure[i](a, b) = hj.k(a, b) - (hj.e_perp[i] / double(m)) * h(a, b) - (s / 6.0) * hj.H_perp(a, b);
        hj.K_mixed[i](a, b) = hj.k(a, b) - (s / 2.0) * hj.H_perp(a, b);
      }
    // only the tangential part of pi e_s pairs with E_a
    const JetTensor& pe = s > 0 ? hj.sigma.pe_plus : hj.sigma.pe_minus;
    hj.L[i] = JetTensor({m});
    for (int a = 0; a < m; ++a) {
      Jet v(0.0);
      for (int b = 0; b < m; ++b) v += h(a, b) * pe(b);
      hj.L[i](a) = (s * hj.epsilon / (d - 1.0)) * v;
    }
  }
}

InducedStructure induce(const HypersurfaceJets& hj) {
  InducedStructure is;
  is.d = hj.d;
  is.epsilon = hj.epsilon;
  is.h = values(hj.sigma.g);
  is.H_par = values(hj.sigma.H);
  is.H_perp = values(hj.H_perp);
  is.xi_par = values(hj.sigma.xi);
  is.X_par = values(hj.sigma.X);
  is.x = hj.x.value();
  is.e_perp_plus = hj.e_perp[0].value();
  is.e_perp_minus = hj.e_perp[1].value();
  return is;
}

InducedStructure induce(const AmbientStructure& amb, const EmbeddingMap& emb, const std::vector<double>& sigma_point) {
  return induce(hypersurface_jets(amb, emb, sigma_point));
}

ShapeData gen_second_fundamental_form(const HypersurfaceJets& hj) {
  ShapeData sd;
  const int m = hj.m;
  sd.n = values(hj.n);
  sd.k = values(hj.k);
  const RealTensor hi = values(hj.sigma.ginv);
  sd.A = RealTensor::cube(m, 2);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) sd.A(a, b) += hi(a, c) * sd.k(b, c);
  sd.K_pure_plus = values(hj.K_pure[0]);
  sd.K_pure_minus = values(hj.K_pure[1]);
  sd.K_mixed_plus = values(hj.K_mixed[0]);
  sd.K_mixed_minus = values(hj.K_mixed[1]);
  sd.T_plus = hj.T[0].value();
  sd.T_minus = hj.T[1].value();
  sd.L_plus = values(hj.L[0]);
  sd.L_minus = values(hj.L[1]);
  return sd;
}

ShapeData gen_second_fundamental_form(const AmbientStructure& amb, const EmbeddingMap& emb,
                                      const std::vector<double>& sigma_point) {
  return gen_second_fundamental_form(hypersurface_jets(amb, emb, sigma_point));
}

FrameConnection induced_connection(const HypersurfaceJets& hj) { return canonical_frame_connection(hj.sigma, hj.d); }

FrameConnection induced_connection(const AmbientStructure& amb, const EmbeddingMap& emb,
                                   const std::vector<double>& sigma_point) {
  return induced_connection(hypersurface_jets(amb, emb, sigma_point));
}

Jet frame_divergence(const FrameConnection& fc, const JetTensor& v) {
  const int n = 2 * fc.d;
  Jet s(0.0);
  for (int A = 0; A < n; ++A) {
    s += v(A).partial(A % fc.d);
    for (int Y = 0; Y < n; ++Y) s += fc.G(A, A, Y) * v(Y);
  }
  return s;
}

ResidualReport gauss_residuals(const HypersurfaceJets& hj, double tol) {
  const SigmaFrame F = build_frame(hj);
  const int m = F.m;
  ResidualReport rep;
  rep.scenario = "gauss";
  rep.point = hj.sigma_point;
  for (int s : {+1, -1}) {
    const int i = slot(s), os = F.off(s), oo = F.off(-s);
    const RealTensor& K = F.Kv[i];
    double pure = 0.0, mixed = 0.0;
    for (int A = 0; A < m; ++A)
      for (int B = 0; B < m; ++B)
        for (int V = 0; V < m; ++V)
          for (int W = 0; W < m; ++W) {
            const int a = os + A, v = os + V, w = os + W;
            {
              const int b = os + B;
              const double lhs = 2.0 * s * F.eps * (F.Rm(a, b, v, w) - F.RmS(a, b, v, w));
              const double rhs = K(w, a) * K(v, b) - K(v, a) * K(w, b) + K(a, w) * K(b, v) - K(b, w) * K(a, v) +
                                 (K(v, w) - K(w, v)) * (K(b, a) - K(a, b));
              pure = std::max(pure, std::fabs(lhs - rhs));
            }
            {
              const int b = oo + B;
              const double lhs = 2.0 * s * F.eps * (F.Rm(a, b, v, w) - F.RmS(a, b, v, w));
              const double rhs = K(a, w) * K(b, v) - K(b, w) * K(a, v) + (K(v, w) - K(w, v)) * K(b, a);
              mixed = std::max(mixed, std::fabs(lhs - rhs));
            }
          }
    const std::string tag = s > 0 ? "+" : "-";
    rep.add("gauss pure " + tag, pure, tol);
    rep.add("gauss mixed " + tag, mixed, tol);
  }
  return rep;
}

ResidualReport gauss_residuals(const AmbientStructure& amb, const EmbeddingMap& emb,
                               const std::vector<double>& sigma_point, double tol) {
  return gauss_residuals(hypersurface_jets(amb, emb, sigma_point), tol);
}

ResidualReport codazzi_residuals(const HypersurfaceJets& hj, double tol) {
  require_order(hj.K_pure[0](0, 0), 1, "Codazzi residuals");
  const SigmaFrame F = build_frame(hj);
  const int m = F.m, N = F.N;
  const double eps = F.eps;
  ResidualReport rep;
  rep.scenario = "codazzi";
  rep.point = hj.sigma_point;
  for (int s : {+1, -1}) {
    const int i = slot(s), j = slot(-s), os = F.off(s), oo = F.off(-s);
    const RealTensor& K = F.Kv[i];
    const RealTensor& Ko = F.Kv[j];
    const RealTensor& A = F.A[i];
    const RealTensor& Ao = F.A[j];
    const RealTensor& DK = F.DK[i];
    const RealTensor& L = F.Lv[i];
    const RealTensor& DL = F.DL[i];
    const RealTensor& DLo = F.DL[j];
    const int ns = s > 0 ? F.np() : F.nm();
    const int nd = F.ndiff();
    const double sd = s > 0 ? 1.0 : -1.0;  // n_s - n_-s = sd (n_+ - n_-)
    auto KA = [&](const RealTensor& Kt, const RealTensor& At, int x, int y) {
      // Kt(At f_x, f_y)
      double v = 0.0;
      for (int M = 0; M < N; ++M) v += At(M, x) * Kt(M, y);
      return v;
    };
    auto KxA = [&](const RealTensor& Kt, const RealTensor& At, int x, int y) {
      // Kt(f_x, At f_y)
      double v = 0.0;
      for (int M = 0; M < N; ++M) v += At(M, y) * Kt(x, M);
      return v;
    };
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    for (int P = 0; P < m; ++P)
      for (int Q = 0; Q < m; ++Q) {
        const int a = os + P;
        for (int R = 0; R < m; ++R) {
          const int w = os + R;
          {
            const int b = oo + Q;
            const double lhs = 2.0 * s * F.Rm(a, b, ns, w);
            const double rhs = DK(b, a, w) - DK(a, b, w) + eps * K(b, a) * L(w);
            c1 = std::max(c1, std::fabs(lhs - rhs));
          }
          {
            const int b = os + Q;
            const double lhs = 2.0 * s * sd * F.Rm(a, b, nd, w);
            const double rhs = DK(w, a, b) - DK(w, b, a) + DK(b, a, w) - DK(a, b, w) +
                               eps * (L(w) * (K(b, a) - K(a, b)) + L(b) * K(w, a) - L(a) * K(w, b));
            c2 = std::max(c2, std::fabs(lhs - rhs));
          }
        }
        {
          const int b = os + Q;
          const double lhs = 2.0 * s * F.Rm(a, nd, nd, b);
          double tr = 0.0;
          for (int X = 0; X < m; ++X)
            for (int Y = 0; Y < m; ++Y) tr += F.fc.gen_inv(os + X, os + Y) * K(os + X, a) * K(os + Y, b);
          // The trace over E in the displayed identity also runs over the
          // normal directions n_+, n_-; they add eps L(a) L(b).
          const double rhs = KA(K, A, a, b) + KA(K, A, b, a) - 2.0 * KxA(K, A, a, b) - KA(K, Ao, a, b) + tr -
                             DL(a, b) - DL(b, a) + eps * L(a) * L(b);
          c3 = std::max(c3, std::fabs(lhs - rhs));
        }
        {
          const int b = oo + Q;
          const double lhs = 2.0 * s * F.Rm(a, nd, nd, b);
          const double rhs = 2.0 * KA(K, A, b, a) - KxA(K, A, a, b) - 2.0 * KA(Ko, Ao, a, b) + KxA(Ko, Ao, b, a) +
                             DLo(a, b) - DL(b, a);
          c4 = std::max(c4, std::fabs(lhs - rhs));
        }
      }
    const std::string tag = s > 0 ? "+" : "-";
    rep.add("codazzi 1 " + tag, c1, tol);
    rep.add("codazzi 2 " + tag, c2, tol);
    rep.add("codazzi 3 " + tag, c3, tol);
    rep.add("codazzi 4 " + tag, c4, tol);
  }
  return rep;
}

ResidualReport codazzi_residuals(const AmbientStructure& amb, const EmbeddingMap& emb,
                                 const std::vector<double>& sigma_point, double tol) {
  return codazzi_residuals(hypersurface_jets(amb, emb, sigma_point), tol);
}

EnergyConstraint energy_constraint(const HypersurfaceJets& hj) {
  const RealTensor n = values(hj.n);
  const GenRicciMixed rc = gen_ricci_mixed(hj.ambient);
  const double Sc = gen_scalar(hj.ambient);
  const double ScS = gen_scalar(hj.sigma);
  const RealTensor hi = values(hj.sigma.ginv);
  const double eps = hj.epsilon;
  const double T2 = 0.5 * (hj.T[0].value() * hj.T[0].value() + hj.T[1].value() * hj.T[1].value());
  EnergyConstraint ec;
  for (int s : {+1, -1}) {
    const int i = slot(s);
    const RealTensor& R = s > 0 ? rc.rc_plus : rc.rc_minus;
    double rnn = 0.0;
    for (int a = 0; a < hj.d; ++a)
      for (int b = 0; b < hj.d; ++b) rnn += R(a, b) * n(a) * n(b);
    const RealTensor K = values(hj.K_mixed[i]);
    ec.lhs[i] = 2.0 * rnn - eps * Sc;
    ec.rhs[i] = -eps * ScS - contract2(K, K, hi) + T2;
    ec.residual = std::max(ec.residual, std::fabs(ec.lhs[i] - ec.rhs[i]));
  }
  return ec;
}

EnergyConstraint energy_constraint(const AmbientStructure& amb, const EmbeddingMap& emb,
                                   const std::vector<double>& sigma_point) {
  return energy_constraint(hypersurface_jets(amb, emb, sigma_point));
}

MomentumConstraint momentum_constraint(const HypersurfaceJets& hj) {
  require_order(hj.T[0], 1, "the momentum constraint");
  const int d = hj.d, m = hj.m, N = 2 * m;
  const RealTensor n = values(hj.n), E = values(hj.E);
  const GenRicciMixed rc = gen_ricci_mixed(hj.ambient);
  const HContractions hc = h_contractions(hj.ambient);
  const RealTensor h = values(hj.sigma.g), hi = values(hj.sigma.ginv);
  const auto lc = connection(hj.sigma, Torsion::LeviCivita);
  const FrameConnection fc = induced_connection(hj);
  const double cd = 1.0 / (d - 1.0);

  MomentumConstraint mc;
  for (int s : {+1, -1}) {
    const int i = slot(s);
    const RealTensor& R = s > 0 ? rc.rc_plus : rc.rc_minus;
    const RealTensor pe = values(s > 0 ? hj.sigma.pe_plus : hj.sigma.pe_minus);
    JetTensor B = hj.K_mixed[i];
    B.with_variance("dd");
    const RealTensor nB = values(covariant_derivative(B, lc));  // (c, a, b)
    const RealTensor Bv = values(B);

    // Shape operator of K^{n_s} on the E_Sigma frame, as jets.
    const int os = s > 0 ? 0 : m, oo = s > 0 ? m : 0;
    JetTensor Ash = JetTensor::cube(N, 2);  // (M, X): only X in band -s, M in band s matter here
    for (int M = 0; M < m; ++M)
      for (int X = 0; X < m; ++X) {
        Jet v(0.0);
        for (int Y = 0; Y < m; ++Y) v += hj.sigma.ginv(M, Y) * hj.K_mixed[i](X, Y);
        Ash(os + M, oo + X) = v;
      }
    const RealTensor G = values(fc.G);
    const RealTensor Av = values(Ash);

    mc.lhs[i] = RealTensor({m});
    mc.rhs[i] = RealTensor({m});
    mc.rhs_frame[i] = RealTensor({m});
    for (int a = 0; a < m; ++a) {
      double l = 0.0, h2 = 0.0;
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
          l += R(mu, nu) * E(mu, a) * n(nu);
          h2 += hc.Hsq(mu, nu) * n(mu) * E(nu, a);
        }
      double div = 0.0, epart = 0.0;
      for (int b = 0; b < m; ++b) {
        epart += Bv(a, b) * pe(b);
        for (int c = 0; c < m; ++c) div += hi(b, c) * nB(b, a, c);
      }
      const double dT = hj.T[i].d(a);
      mc.lhs[i](a) = l;
      mc.rhs[i](a) = div - s * epart - 0.25 * h2 - dT;

      // div_{D^Sigma} of the shape operator at f_X, X = oo + a, then the shift
      // from div_{D^Sigma} to div_Sigma = div^H - <e_par, .>.
      const int X = oo + a;
      double fd = 0.0;
      for (int C = 0; C < N; ++C) {
        fd += Ash(C, X).d(C % m);
        for (int M = 0; M < N; ++M) fd += G(C, C, M) * Av(M, X) - G(M, C, X) * Av(C, M);
      }
      double epair = 0.0;  // <e_par, A f_X> with A f_X in band s
      for (int M = 0; M < m; ++M)
        for (int c = 0; c < m; ++c) epair += s * h(c, M) * pe(c) * Av(os + M, X);
      mc.rhs_frame[i](a) = fd - cd * epair - dT;
    }
    mc.residual = std::max(mc.residual, max_abs_diff(mc.lhs[i], mc.rhs[i]));
    mc.frame_residual = std::max(mc.frame_residual, max_abs_diff(mc.rhs[i], mc.rhs_frame[i]));
  }
  return mc;
}

MomentumConstraint momentum_constraint(const AmbientStructure& amb, const EmbeddingMap& emb,
                                       const std::vector<double>& sigma_point) {
  return momentum_constraint(hypersurface_jets(amb, emb, sigma_point));
}

ResidualReport ClassicalConstraints::report(double tol) const {
  ResidualReport r;
  r.scenario = "classical constraints";
  r.add("energy", std::fabs(energy), tol);
  r.add("momentum", max_abs(momentum), tol);
  r.add("flux", max_abs(flux), tol);
  return r;
}

ClassicalConstraints classical_constraints(const HypersurfaceJets& hj) {
  const RealTensor X = values(hj.ambient.X);
  if (max_abs(X) > 0.0) throw GeometryError("classical decomposition requires e = 2 xi, d xi = 0");
  {
    const int d = hj.d;
    double dxi = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) dxi = std::max(dxi, std::fabs(hj.ambient.xi(j).d(i) - hj.ambient.xi(i).d(j)));
    if (dxi > 1e-9) throw GeometryError("classical decomposition requires e = 2 xi, d xi = 0");
  }
  const int m = hj.m;
  const double eps = hj.epsilon;
  const Geometry& S = hj.sigma;
  const RealTensor hi = values(S.ginv);
  const RealTensor k = values(hj.k), Hp = values(hj.H_perp), Hpar = values(S.H), xi = values(S.xi);
  const auto lc = connection(S, Torsion::LeviCivita);
  double trk = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) trk += hi(a, b) * k(a, b);
  const double k2 = contract2(k, k, hi), Hp2 = contract2(Hp, Hp, hi);
  const double Hpar2 = h_contractions(S).normH2;
  double xi2 = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) xi2 += hi(a, b) * xi(a) * xi(b);
  const double x = hj.x.value();
  const double Sc = curvature(S).Sc;

  ClassicalConstraints cc;
  cc.energy = (-eps * Sc + trk * trk - k2) -
              (-eps * Hpar2 / 12.0 + Hp2 / 4.0 - 2.0 * eps * codifferential_xi(S) + 2.0 * trk * x - eps * xi2 - x * x);

  JetTensor kj = hj.k;
  kj.with_variance("dd");
  const RealTensor nk = values(covariant_derivative(kj, lc));
  JetTensor Hj = hj.H_perp;
  Hj.with_variance("dd");
  const RealTensor nH = values(covariant_derivative(Hj, lc));
  Jet trkj(0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) trkj += S.ginv(a, b) * hj.k(a, b);
  std::vector<double> xiu(m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) xiu[a] += hi(a, b) * xi(b);

  cc.momentum = RealTensor({m});
  cc.flux = RealTensor({m});
  for (int a = 0; a < m; ++a) {
    double divk = 0.0, divH = 0.0, HH = 0.0, ik = 0.0, iH = 0.0;
    for (int b = 0; b < m; ++b) {
      ik += xiu[b] * k(b, a);
      iH += xiu[b] * Hp(b, a);
      for (int c = 0; c < m; ++c) {
        divk += hi(b, c) * nk(b, c, a);
        divH += hi(b, c) * nH(b, a, c);
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) HH += hi(b, p) * hi(c, q) * Hp(b, c) * Hpar(a, p, q);
      }
    }
    cc.momentum(a) = divk - trkj.d(a) - 0.25 * kHperpHparFactor * HH + hj.x.d(a) - ik;
    cc.flux(a) = divH + iH;
  }
  return cc;
}

ClassicalConstraints classical_constraints(const AmbientStructure& amb, const EmbeddingMap& emb,
                                           const std::vector<double>& sigma_point) {
  return classical_constraints(hypersurface_jets(amb, emb, sigma_point));
}

namespace {

// |L_X g| and |d xi - H(X)| as max-abs component norms.
std::pair<double, double> compatibility_pair(const Geometry& geo) {
  const int d = geo.d;
  const RealTensor L = values(lie_derivative_metric(geo.X, geo));
  const RealTensor X = values(geo.X), H = values(geo.H);
  double dx = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = geo.xi(j).d(i) - geo.xi(i).d(j);
      for (int k = 0; k < d; ++k) v -= X(k) * H(k, i, j);
      dx = std::max(dx, std::fabs(v));
    }
  return {max_abs(L), dx};
}

}  // namespace

ResidualReport compatibility_check(const AmbientStructure& amb, const EmbeddingMap* emb,
                                   const std::vector<double>& point, double tol) {
  ResidualReport r;
  r.scenario = "compatibility";
  r.point = point;
  if (emb == nullptr) {
    auto [lx, dx] = compatibility_pair(Geometry::at(amb, point));
    r.add("L_X g", lx, tol);
    r.add("d xi - H(X)", dx, tol);
    return r;
  }
  const HypersurfaceJets hj = hypersurface_jets(amb, *emb, point);
  auto [lx, dx] = compatibility_pair(hj.ambient);
  r.add("L_X g", lx, tol);
  r.add("d xi - H(X)", dx, tol);
  auto [lxs, dxs] = compatibility_pair(hj.sigma);
  r.add("L_X h (induced)", lxs, tol);
  r.add("d xi - H(X) (induced)", dxs, tol);
  return r;
}

}  // namespace gcurv
