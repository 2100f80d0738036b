#include "gcurv/flatness.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace gcurv {

namespace {

double gdot(const RealTensor& g, const RealTensor& A, const RealTensor& B) {
  double s = 0.0;
  for (int i = 0; i < g.extent(0); ++i) {
    for (int j = 0; j < g.extent(0); ++j) s += g(i, j) * A(i) * B(j);
  }
  return s;
}

RealTensor column(const RealTensor& F, int c) {
  RealTensor v({F.extent(0)});
  for (int i = 0; i < F.extent(0); ++i) v(i) = F(i, c);
  return v;
}

double eval4(const RealTensor& T, const RealTensor& A, const RealTensor& B) {
  const int d = A.extent(0);
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double ab = A(a) * B(b);
      if (ab == 0.0) continue;
      for (int v = 0; v < d; ++v) {
        for (int w = 0; w < d; ++w) s += T(a, b, v, w) * ab * A(v) * B(w);
      }
    }
  }
  return s;
}

const JetTensor& pe_of(const Geometry& geo, int band) { return band > 0 ? geo.pe_plus : geo.pe_minus; }

// (c, k) = (nabla^t_c pi e_s)^k as real values.
RealTensor nabla_pe(const Geometry& geo, int band, double t) {
  JetTensor pe = pe_of(geo, band);
  pe.with_variance("u");
  return values(covariant_derivative(pe, connection(geo, t)));
}

// Lowers the second index of (c, k).
RealTensor lower_second(const RealTensor& T, const RealTensor& g) {
  const int d = g.extent(0);
  RealTensor out = RealTensor::cube(d, 2);
  for (int c = 0; c < d; ++c) {
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += T(c, k) * g(k, j);
      out(c, j) = s;
    }
  }
  return out;
}

}  // namespace

double FlatnessReport::max() const {
  double m = 0.0;
  for (const auto& [name, v] : fields()) m = std::max(m, v);
  return m;
}

std::vector<std::pair<std::string, double>> FlatnessReport::fields() const {
  return {{"max_gen_riemann", max_gen_riemann}, {"weyl", weyl},
          {"nabla_H", nabla_H},                 {"nabla_pe_plus", nabla_pe_plus},
          {"nabla_pe_minus", nabla_pe_minus},   {"dilaton_eom", dilaton_eom},
          {"q_vs_h2", q_vs_h2},                 {"div_antisymmetry", div_antisymmetry},
          {"quadratic_rm", quadratic_rm}};
}

double QTensor::operator()(const RealTensor& A, const RealTensor& B) const {
  const double AA = gdot(g, A, A), BB = gdot(g, B, B), AB = gdot(g, A, B);
  const double Ae = gdot(g, A, pe), Be = gdot(g, B, pe), ee = gdot(g, pe, pe);
  const double cs = AA * BB - AB * AB;
  return (2.0 * ee * cs - BB * Ae * Ae - AA * Be * Be + 2.0 * AB * Ae * Be) / (2.0 * (d - 1.0) * (d - 1.0));
}

QTensor q_tensor(const Geometry& geo, int band) {
  QTensor q;
  q.d = geo.d;
  q.g = values(geo.g);
  q.pe = values(pe_of(geo, band));
  return q;
}

RealTensor orthonormal_frame(const RealTensor& g) {
  const int d = g.extent(0);
  Eigen::MatrixXd G(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) G(i, j) = g(i, j);
  }
  // Euclidean-orthonormal eigenvectors of a symmetric matrix are also
  // g-orthogonal, which sidesteps null coordinate directions.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  RealTensor F = RealTensor::cube(d, 2);
  for (int c = 0; c < d; ++c) {
    const double lam = es.eigenvalues()(c);
    if (std::fabs(lam) < kDegeneracyTol) throw GeometryError("degenerate metric: orthonormal frame unavailable");
    const double s = 1.0 / std::sqrt(std::fabs(lam));
    for (int i = 0; i < d; ++i) F(i, c) = s * es.eigenvectors()(i, c);
  }
  return F;
}

std::vector<std::pair<RealTensor, RealTensor>> orthogonal_pairs(const RealTensor& g, int random_pairs,
                                                                unsigned seed) {
  const int d = g.extent(0);
  std::vector<std::pair<RealTensor, RealTensor>> pairs;
  RealTensor F = orthonormal_frame(g);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) pairs.emplace_back(column(F, a), column(F, b));
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto draw = [&] {
    RealTensor v({d});
    for (int i = 0; i < d; ++i) v(i) = U(rng);
    return v;
  };
  auto normalise = [&](RealTensor v) {
    const double n = std::sqrt(std::fabs(gdot(g, v, v)));
    v *= 1.0 / n;
    return v;
  };
  int made = 0, tries = 0;
  while (made < random_pairs && tries < 100 * (random_pairs + 1)) {
    ++tries;
    RealTensor A = draw();
    const double AA = gdot(g, A, A);
    if (std::fabs(AA) < 1e-2) continue;
    RealTensor B = draw();
    B -= (gdot(g, A, B) / AA) * A;
    if (std::fabs(gdot(g, B, B)) < 1e-2) continue;
    pairs.emplace_back(normalise(A), normalise(B));
    ++made;
  }
  return pairs;
}

double q_vs_h2_residual(const Geometry& geo) {
  const int d = geo.d;
  const RealTensor g = values(geo.g);
  HContractions hc = h_contractions(geo);
  double worst = 0.0;
  for (int s : {+1, -1}) {
    QTensor Q = q_tensor(geo, s);
    const double div = metric_divergence(geo, s);
    for (const auto& [A, B] : orthogonal_pairs(g)) {
      const double AB = gdot(g, A, B);
      const double cs = gdot(g, A, A) * gdot(g, B, B) - AB * AB;
      const double lhs = eval4(hc.H2form, A, B) / 6.0;
      const double rhs = -s * div / (d * (d - 1.0)) * cs + Q(A, B);
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  return worst;
}

double q_vs_h2_residual(const AmbientStructure& amb, const std::vector<double>& point) {
  return q_vs_h2_residual(Geometry::at(amb, point));
}

double quadratic_rm_residual(const Geometry& geo) {
  const int d = geo.d;
  const RealTensor g = values(geo.g);
  const RealTensor Rm = values(riemann(geo));
  double worst = 0.0;
  for (int s : {+1, -1}) {
    const RealTensor pe = values(pe_of(geo, s));
    const double div = metric_divergence(geo, s);
    const double ee = gdot(g, pe, pe);
    for (const auto& [A, B] : orthogonal_pairs(g)) {
      const double AA = gdot(g, A, A), BB = gdot(g, B, B);
      const double Ae = gdot(g, A, pe), Be = gdot(g, B, pe);
      // Substituting H^(2)/6 = -s div/(d(d-1)) CS + Q into the mixed quadratic
      // identity gives the -5s/(2d(d-1)) divergence coefficient.
      const double pred = -5.0 * s * div / (2.0 * d * (d - 1.0)) * AA * BB +
                          3.0 / (4.0 * (d - 1.0) * (d - 1.0)) * (2.0 * ee * AA * BB - BB * Ae * Ae - AA * Be * Be);
      worst = std::max(worst, std::fabs(eval4(Rm, A, B) - pred));
    }
  }
  return worst;
}

FlatnessReport flatness_report(const Geometry& geo) {
  const int d = geo.d;
  if (d < 3) throw GeometryError("flatness diagnostics need d >= 3");
  FlatnessReport r;
  GenRiemann R = gen_riemann(geo);
  for (const RealTensor* t : {&R.pure_plus, &R.pure_minus, &R.mixed_plus, &R.mixed_minus})
    r.max_gen_riemann = std::max(r.max_gen_riemann, max_abs(*t));
  r.weyl = max_abs(curvature(geo).Weyl);
  JetTensor H = geo.H;
  H.with_variance("ddd");
  r.nabla_H = max_abs(values(covariant_derivative(H, connection(geo, Torsion::LeviCivita))));

  const RealTensor g = values(geo.g);
  const double div_p = metric_divergence(geo, +1), div_m = metric_divergence(geo, -1);
  for (int s : {+1, -1}) {
    RealTensor gn = lower_second(nabla_pe(geo, s, 0.5 * s), g);
    const double div = s > 0 ? div_p : div_m;
    double m = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) m = std::max(m, std::fabs(gn(a, b) - div / d * g(a, b)));
    }
    (s > 0 ? r.nabla_pe_plus : r.nabla_pe_minus) = m;
  }
  const RealTensor pp = values(geo.pe_plus);
  r.dilaton_eom = std::fabs(h_contractions(geo).normH2 / 6.0 + div_p - gdot(g, pp, pp));
  r.q_vs_h2 = q_vs_h2_residual(geo);
  r.div_antisymmetry = std::fabs(div_p + div_m);
  r.quadratic_rm = quadratic_rm_residual(geo);
  return r;
}

FlatnessReport flatness_report(const AmbientStructure& amb, const std::vector<double>& point) {
  return flatness_report(Geometry::at(amb, point));
}

ResidualReport triviality_check(const Geometry& geo, double tol) {
  const int d = geo.d;
  ResidualReport rep;
  const RealTensor g = values(geo.g);
  HContractions hc = h_contractions(geo);
  rep.add("|H|^2", std::fabs(hc.normH2), tol);
  for (int s : {+1, -1}) {
    const std::string b = s > 0 ? "+" : "-";
    const RealTensor pe = values(pe_of(geo, s));
    rep.add("|e" + b + "|^2", std::fabs(gdot(g, pe, pe)), tol);
    rep.add("nabla pi e" + b, max_abs(nabla_pe(geo, s, 0.0)), tol);
    rep.add("nabla^" + b + " pi e" + b, max_abs(nabla_pe(geo, s, 0.5 * s)), tol);
    double iota = 0.0;
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        double t = 0.0;
        for (int i = 0; i < d; ++i) t += pe(i) * hc.H(i, j, k);
        iota = std::max(iota, std::fabs(t));
      }
    }
    rep.add("iota_{pi e" + b + "} H", iota, tol);
  }
  auto [p, q] = signature_of(g);
  if (q == 0 || p == 0) {
    rep.add("H components", max_abs(hc.H), tol);
    rep.add("e components", std::max(max_abs(values(geo.X)), max_abs(values(geo.xi))), tol);
  }
  return rep;
}

ResidualReport triviality_check(const AmbientStructure& amb, const std::vector<double>& point, double tol) {
  ResidualReport rep = triviality_check(Geometry::at(amb, point), tol);
  rep.scenario = amb.chart.name;
  rep.point = point;
  return rep;
}

double conformal_factor_residual(const Geometry& geo, int sigma) {
  const int d = geo.d;
  const double c = sigma * std::sqrt(3.0) / (2.0 * (d - 1.0));
  const RealTensor g = values(geo.g), gi = values(geo.ginv);
  const RealTensor pe = values(geo.pe_plus);
  RealTensor dphi = lower(pe, g);
  dphi *= c;
  RealTensor hess = lower_second(nabla_pe(geo, +1, 0.0), g);
  hess *= c;
  double lap = 0.0, norm = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      lap += gi(i, j) * hess(i, j);
      norm += gi(i, j) * dphi(i) * dphi(j);
    }
  }
  const RealTensor Rc = curvature(geo).Rc;
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double rhs = (d - 2.0) * (hess(i, j) - dphi(i) * dphi(j)) + (lap + (d - 2.0) * norm) * g(i, j);
      worst = std::max(worst, std::fabs(Rc(i, j) - rhs));
    }
  }
  return worst;
}

double conformal_factor_residual(const AmbientStructure& amb, const std::vector<double>& point, int sigma) {
  return conformal_factor_residual(Geometry::at(amb, point), sigma);
}

AmbientStructure neutral_flat_example(int m, int eps) {
  if (m < 2) throw GeometryError("neutral_flat_example needs m >= 2");
  if (eps != 1 && eps != -1) throw GeometryError("neutral_flat_example: eps must be +1 or -1");
  const int d = 2 * m;
  std::vector<std::string> coords = {"u", "v"};
  for (int i = 2; i <= m; ++i) coords.push_back("x" + std::to_string(i));
  for (int i = 2; i <= m; ++i) coords.push_back("y" + std::to_string(i));

  std::vector<std::vector<std::string>> g(d, std::vector<std::string>(d, "0"));
  g[0][1] = g[1][0] = "1/(2*u)";
  for (int i = 0; i < m - 1; ++i) {
    g[2 + i][2 + i] = "1/u";
    g[m + 1 + i][m + 1 + i] = "-1/u";
  }
  std::vector<HComponent> H;
  for (int i = 0; i < m - 1; ++i) H.push_back({{0, 2 + i, m + 1 + i}, "1/u^2"});

  // pi e_+ = (2(d-1)/sqrt 3) d_v, whose g-dual is (d-1)/(sqrt(3) u) du.
  const std::string dm1 = std::to_string(d - 1);
  std::vector<std::string> X(d, "0"), xi(d, "0");
  if (eps > 0) {
    X[1] = "2*" + dm1 + "/sqrt(3)";
  } else {
    xi[0] = dm1 + "/(sqrt(3)*u)";
  }
  AmbientStructure amb = make_ambient("neutral_flat_example_m" + std::to_string(m), coords, g, m, m, H,
                                      eps > 0 ? X : std::vector<std::string>{}, eps > 0 ? std::vector<std::string>{} : xi);
  amb.chart.set_domain("u", kNeutralDomainMin, std::numeric_limits<double>::infinity());
  std::vector<double> probe(d, 0.0);
  probe[0] = 1.0;
  if (dH_residual(Geometry::at(amb, probe)) > 1e-12) throw GeometryError("neutral_flat_example: H not closed");
  return amb;
}

}  // namespace gcurv
