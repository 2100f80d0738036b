#include <cmath>

#include "doctest.h"
#include "gcurv/fundamental.hpp"

using namespace gcurv;

namespace {

using Pts = std::vector<std::array<double, 3>>;

HypersurfaceData sphere_data() {
  return HypersurfaceData::classical(Chart("S2", {"th", "ph"}), {{"1", "0"}, {"0", "sin(th)^2"}},
                                     {{"1", "0"}, {"0", "sin(th)^2"}});
}

HypersurfaceData flat_data(const std::vector<std::vector<std::string>>& k) {
  return HypersurfaceData::classical(Chart("plane", {"u", "v"}), {{"1", "0"}, {"0", "1"}}, k);
}

// Graph z = f(x, y), f = 0.3 x^2 + 0.2 x y - 0.1 y^2, upward normal.
const char* kGraphF = "0.3*x^2 + 0.2*x*y - 0.1*y^2";
const char* kW = "sqrt(1 + (0.6*x + 0.2*y)^2 + (0.2*x - 0.2*y)^2)";

HypersurfaceData graph_data() {
  const std::string fx = "(0.6*x + 0.2*y)", fy = "(0.2*x - 0.2*y)", W = kW;
  return HypersurfaceData::classical(
      Chart("graph", {"x", "y"}),
      {{"1 + " + fx + "^2", fx + "*" + fy}, {fx + "*" + fy, "1 + " + fy + "^2"}},
      {{"-0.6/" + W, "-0.2/" + W}, {"-0.2/" + W, "0.2/" + W}});
}

Pts analytic(const GridSpec& g, const std::function<std::array<double, 3>(double, double)>& F) {
  Pts out;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const auto p = g.at(i, j);
      out.push_back(F(p[0], p[1]));
    }
  return out;
}

std::array<double, 3> sphere_point(double th, double ph) {
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}

}  // namespace

TEST_CASE("classical flat Gauss-Codazzi residuals") {
  ClassicalGC s = classical_flat_gc_residual(sphere_data(), {0.7, 0.3});
  CHECK(s.gauss < 1e-14);
  CHECK(s.codazzi < 1e-14);

  ClassicalGC z = classical_flat_gc_residual(flat_data({{"0", "0"}, {"0", "0"}}), {0.2, 0.1});
  CHECK(z.gauss == 0.0);
  CHECK(z.codazzi == 0.0);

  // cylinder data: flat and Codazzi-compatible
  ClassicalGC c = classical_flat_gc_residual(flat_data({{"1", "0"}, {"0", "0"}}), {0.2, 0.1});
  CHECK(c.gauss == 0.0);
  CHECK(c.codazzi == 0.0);

  // k = h on flat h: Rm = 0 against det k = 1
  ClassicalGC u = classical_flat_gc_residual(flat_data({{"1", "0"}, {"0", "1"}}), {0.2, 0.1});
  CHECK(u.gauss == doctest::Approx(1.0));

  // k = v du^2: (nabla_v k)(u, u) = 1, (nabla_u k)(v, u) = 0
  ClassicalGC cod = classical_flat_gc_residual(flat_data({{"v", "0"}, {"0", "0"}}), {0.2, 0.1});
  CHECK(cod.codazzi == doctest::Approx(1.0));
}

TEST_CASE("graph data agrees with the hypersurface module") {
  // the same surface embedded in flat R^3 gives the data's k and h
  auto amb = make_ambient("flat", {"x", "y", "z"}, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}, 3, 0);
  auto emb = EmbeddingMap::from_strings(Chart("graph", {"x", "y"}), {"x", "y", kGraphF});
  const HypersurfaceData data = graph_data();
  for (const std::vector<double>& p : {std::vector<double>{0.3, -0.2}, {-0.5, 0.4}, {0.0, 0.0}}) {
    HypersurfaceJets emb_j = hypersurface_jets(amb, emb, p);
    HypersurfaceJets dat_j = hypersurface_jets(data, p);
    CHECK(max_abs_diff(values(emb_j.k), values(dat_j.k)) < 1e-14);
    CHECK(max_abs_diff(values(emb_j.sigma.g), values(dat_j.sigma.g)) < 1e-14);
    CHECK(flat_gc_residual(data, p).max_residual() < 1e-12);
    ClassicalGC c = classical_flat_gc_residual(data, p);
    CHECK(c.gauss < 1e-12);
    CHECK(c.codazzi < 1e-12);
  }
}

TEST_CASE("generalised flat Gauss-Codazzi residuals") {
  ResidualReport s = flat_gc_residual(sphere_data(), {0.7, 0.3});
  CHECK(s.entries.size() == 12);
  CHECK(s.pass());
  CHECK(s.max_residual() < 1e-8);

  CHECK(flat_gc_residual(flat_data({{"0", "0"}, {"0", "0"}}), {0.2, 0.1}).max_residual() == 0.0);
  // cylinder: det k = 0
  CHECK(flat_gc_residual(flat_data({{"1", "0"}, {"0", "0"}}), {0.2, 0.1}).max_residual() == 0.0);
  ResidualReport u = flat_gc_residual(flat_data({{"1", "0"}, {"0", "1"}}), {0.2, 0.1});
  CHECK(u.value("gauss pure +") == doctest::Approx(2.0));
  CHECK(u.value("gauss mixed +") == doctest::Approx(1.0));
  CHECK(u.value("codazzi 1 +") == 0.0);
}

TEST_CASE("nontrivial H or e data is not flat-compatible") {
  // Riemannian signature forces H = 0 and e = 0 along flat data.
  HypersurfaceData hp = sphere_data();
  hp.H_perp = {{Expr(), parse("0.5*sin(th)", {"th", "ph"})}, {parse("-0.5*sin(th)", {"th", "ph"}), Expr()}};
  ResidualReport r = flat_gc_residual(hp, {0.7, 0.3});
  CHECK(r.max_residual() > 1e-3);
  CHECK_FALSE(r.pass());
  // H_perp alone does not touch the classical check
  ClassicalGC c = classical_flat_gc_residual(hp, {0.7, 0.3});
  CHECK(c.gauss < 1e-14);

  HypersurfaceData ep = sphere_data();
  ep.e_perp_plus = Expr::constant(0.5, {"th", "ph"});
  ep.e_perp_minus = Expr::constant(0.5, {"th", "ph"});
  CHECK(flat_gc_residual(ep, {0.7, 0.3}).max_residual() > 1e-3);

  HypersurfaceData ex = sphere_data();
  ex.sigma.dilaton.X = {parse("0.3", {"th", "ph"}), Expr()};
  CHECK(flat_gc_residual(ex, {0.7, 0.3}).max_residual() > 1e-3);

  HypersurfaceData hs = flat_data({{"0", "0"}, {"0", "0"}});
  hs.sigma = make_ambient("plane", {"u", "v"}, {{"1", "0"}, {"0", "1"}}, 2, 0, {}, {}, {"0.2", "0"});
  CHECK(flat_gc_residual(hs, {0.0, 0.0}).max_residual() > 1e-3);
}

TEST_CASE("reconstruction of flat data") {
  GridSpec g{0.0, 1.0, 0.0, 1.0, 9};
  Immersion im = reconstruct_immersion(flat_data({{"0", "0"}, {"0", "0"}}), g);
  CHECK(im.metric_residual < 1e-10);
  CHECK(im.path_residual < 1e-14);
  // identity chart up to a rigid motion
  CHECK(procrustes_rms(im.F, analytic(g, [](double u, double v) { return std::array<double, 3>{u, v, 0.0}; })) <
        1e-12);
  for (const auto& f : im.frame) CHECK(f[2][2] == doctest::Approx(1.0));
}

TEST_CASE("reconstruction of a sphere patch") {
  const HypersurfaceData data = sphere_data();
  GridSpec g{0.4, 1.2, 0.0, 0.8, 33};
  Immersion im = reconstruct_immersion(data, g);
  CHECK(im.max_gc_residual < 1e-12);
  const Pts ref = analytic(g, sphere_point);
  CHECK(procrustes_rms(im.F, ref) <= 1e-4);
  CHECK(procrustes_rms(im.F, ref) < 1e-8);
  CHECK(im.metric_residual < 1e-7);

  // frame stays orthonormal for h + 1: the normal is a unit vector orthogonal
  // to both tangent columns
  for (const auto& f : im.frame) {
    double nn = 0.0, n0 = 0.0, n1 = 0.0;
    for (int r = 0; r < 3; ++r) {
      nn += f[2][r] * f[2][r];
      n0 += f[2][r] * f[0][r];
      n1 += f[2][r] * f[1][r];
    }
    CHECK(nn == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::fabs(n0) < 1e-7);
    CHECK(std::fabs(n1) < 1e-7);
  }

  // recomputed k matches the input
  double kerr = 0.0;
  for (int i = 2; i < g.n - 2; i += 3)
    for (int j = 2; j < g.n - 2; j += 3) {
      RealTensor k = grid_second_fundamental_form(im, i, j);
      const double th = g.at(i, j)[0];
      kerr = std::max({kerr, std::fabs(k(0, 0) - 1.0), std::fabs(k(0, 1)),
                       std::fabs(k(1, 1) - std::sin(th) * std::sin(th))});
    }
  CHECK(kerr <= 1e-4);

  // fourth-order convergence of the path dependence
  Immersion coarse = reconstruct_immersion(data, GridSpec{0.4, 1.2, 0.0, 0.8, 17});
  CHECK(coarse.path_residual > 0.0);
  CHECK(coarse.path_residual / im.path_residual >= 8.0);
}

TEST_CASE("reconstruction of a cylinder patch") {
  const HypersurfaceData data = flat_data({{"1", "0"}, {"0", "0"}});
  for (int n : {17, 33}) {
    GridSpec g{0.0, 1.0, 0.0, 1.0, n};
    Immersion im = reconstruct_immersion(data, g);
    const Pts ref = analytic(g, [](double u, double v) { return std::array<double, 3>{std::cos(u), std::sin(u), v}; });
    CHECK(procrustes_rms(im.F, ref) <= 1e-4);
    CHECK(im.path_residual < 1e-14);
    RealTensor k = grid_second_fundamental_form(im, n / 2, n / 2);
    CHECK(k(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(k(1, 1)) < 1e-6);
  }
}

TEST_CASE("reconstruction of a graph") {
  GridSpec g{-0.5, 0.5, -0.5, 0.5, 33};
  Immersion im = reconstruct_immersion(graph_data(), g);
  const Pts ref = analytic(g, [](double x, double y) {
    return std::array<double, 3>{x, y, 0.3 * x * x + 0.2 * x * y - 0.1 * y * y};
  });
  CHECK(procrustes_rms(im.F, ref) < 1e-6);
  CHECK(im.metric_residual < 1e-7);
}

TEST_CASE("Procrustes alignment") {
  Pts a = {{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {0, 0, 3}, {1, 1, 1}};
  // rotate by 0.7 about z and translate
  Pts b;
  for (const auto& p : a)
    b.push_back({std::cos(0.7) * p[0] - std::sin(0.7) * p[1] + 1.0, std::sin(0.7) * p[0] + std::cos(0.7) * p[1] - 2.0,
                 p[2] + 0.5});
  CHECK(procrustes_rms(a, b) < 1e-14);
  // a reflection is not a rigid motion
  Pts m;
  for (const auto& p : a) m.push_back({p[0], p[1], -p[2]});
  CHECK(procrustes_rms(a, m) > 0.1);
  CHECK_THROWS(procrustes_rms(a, Pts{}));
}

TEST_CASE("reconstruction errors") {
  GridSpec g{0.0, 1.0, 0.0, 1.0, 9};
  CHECK_THROWS_WITH_AS(reconstruct_immersion(flat_data({{"1", "0"}, {"0", "1"}}), g), "data not flat-compatible",
                       GeometryError);
  CHECK_THROWS_AS(reconstruct_immersion(flat_data({{"0", "0"}, {"0", "0"}}), GridSpec{0.0, 1.0, 0.0, 1.0, 1}),
                  GeometryError);
  CHECK_THROWS_WITH_AS(
      reconstruct_immersion(flat_data({{"0", "0"}, {"0", "0"}}), GridSpec{0.0, 1e-12, 0.0, 1e-12, 5}),
      "step-size underflow", GeometryError);
  auto s3 = HypersurfaceData::classical(Chart("c", {"a", "b", "c"}), {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}},
                                        {{"0", "0", "0"}, {"0", "0", "0"}, {"0", "0", "0"}});
  CHECK_THROWS_AS(reconstruct_immersion(s3, g), GeometryError);
  CHECK_THROWS_AS(HypersurfaceData::classical(Chart("p", {"u", "v"}), {{"1", "0"}, {"0", "1"}}, {{"0", "0"}}),
                  GeometryError);
  CHECK_THROWS_AS(flat_gc_residual(flat_data({{"0", "u"}, {"0", "0"}}), {0.1, 0.1}), GeometryError);
}
