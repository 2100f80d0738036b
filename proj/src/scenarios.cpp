#include "gcurv/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "gcurv/flatness.hpp"
#include "gcurv/random_fields.hpp"
#include "json.hpp"

namespace gcurv {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::vector<std::string>> identity_metric(int d) {
  std::vector<std::vector<std::string>> m(d, std::vector<std::string>(d, "0"));
  for (int i = 0; i < d; ++i) m[i][i] = "1";
  return m;
}

AmbientStructure euclidean(const std::string& name, int d, const std::vector<HComponent>& H = {},
                           const std::vector<std::string>& xi = {}) {
  return make_ambient(name, default_coords(d), identity_metric(d), d, 0, H, {}, xi);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string point_text(const std::vector<double>& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << fmt(p[i]);
  os << ")";
  return os.str();
}

EmbeddingMap coordinate_plane(int d, const std::string& height) {
  std::vector<std::string> s, F;
  for (int i = 1; i < d; ++i) {
    s.push_back("s" + std::to_string(i));
    F.push_back(s.back());
  }
  F.push_back(height);
  return EmbeddingMap::from_strings(Chart("plane", s), F);
}

std::vector<std::vector<double>> shifted_points(std::uint64_t seed, const std::vector<double>& center, int count,
                                                double radius) {
  auto pts = random_points(seed, static_cast<int>(center.size()), count, radius);
  for (auto& p : pts)
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += center[i];
  return pts;
}

Scenario flat_trivial(int d) {
  if (d < 2) throw ScenarioError("flat_trivial needs d >= 2");
  Scenario sc;
  sc.name = "flat_trivial_" + std::to_string(d);
  sc.description = "flat R^" + std::to_string(d) + ", H = 0, e = 0";
  sc.ambient = euclidean(sc.name, d);
  sc.sample_center.assign(d, 0.0);
  sc.random_points = true;
  sc.resample(static_cast<std::uint64_t>(d));
  return sc;
}

// Round unit sphere S^{d-1} in R^d, outward normal, in angular coordinates.
Scenario sphere_in_flat(int d) {
  if (d < 3) throw ScenarioError("sphere_in_flat needs d >= 3");
  Scenario sc;
  sc.name = "sphere_in_flat_" + std::to_string(d);
  sc.description = "unit S^" + std::to_string(d - 1) + " in flat R^" + std::to_string(d);
  sc.ambient = euclidean(sc.name, d);
  const int m = d - 1;
  std::vector<std::string> a, F;
  if (d == 3) {
    a = {"th", "ph"};
    F = {"sin(th)*cos(ph)", "sin(th)*sin(ph)", "cos(th)"};
  } else {
    for (int i = 1; i <= m; ++i) a.push_back("a" + std::to_string(i));
    std::string prefix;
    for (int i = 0; i < d; ++i) {
      if (i < m) {
        F.push_back(prefix + "cos(" + a[i] + ")");
        prefix += "sin(" + a[i] + ")*";
      } else {
        F.push_back(prefix.substr(0, prefix.size() - 1));
      }
    }
  }
  Chart chart(sc.name + "_angles", a);
  for (const auto& c : a) chart.set_domain(c, 0.05, std::numbers::pi - 0.05);
  EmbeddingMap emb = EmbeddingMap::from_strings(chart, F);
  sc.sample_center.assign(m, 0.8);
  // orient outward: g(n, F) > 0
  HypersurfaceJets hj = hypersurface_jets(sc.ambient, emb, sc.sample_center);
  double dot = 0.0;
  for (int i = 0; i < d; ++i) dot += hj.n(i).value() * hj.ambient_point[i];
  if (dot < 0) emb.orientation = -1;
  sc.embedding = emb;
  sc.random_points = true;
  sc.resample(static_cast<std::uint64_t>(100 + d));
  if (d == 3) {
    sc.fundamental = HypersurfaceData::classical(Chart("S2", {"th", "ph"}), {{"1", "0"}, {"0", "sin(th)^2"}},
                                                 {{"1", "0"}, {"0", "sin(th)^2"}});
    sc.grid = GridSpec{0.4, 1.2, 0.0, 0.8, 33};
  }
  return sc;
}

Scenario cylinder_in_flat() {
  Scenario sc;
  sc.name = "cylinder_in_flat";
  sc.description = "unit cylinder in flat R^3";
  sc.ambient = euclidean(sc.name, 3);
  sc.embedding = EmbeddingMap::from_strings(Chart("cyl", {"u", "v"}), {"cos(u)", "sin(u)", "v"});
  sc.sample_center = {0.5, 0.5};
  sc.random_points = true;
  sc.resample(7);
  sc.fundamental =
      HypersurfaceData::classical(Chart("cyl", {"u", "v"}), {{"1", "0"}, {"0", "1"}}, {{"1", "0"}, {"0", "0"}});
  sc.grid = GridSpec{0.0, 1.0, 0.0, 1.0, 33};
  return sc;
}

Scenario hyperplane_with_flux() {
  Scenario sc;
  sc.name = "hyperplane_with_flux";
  sc.description = "plane x3 = 0 in flat R^3 with H = dx1 dx2 dx3";
  sc.ambient = euclidean(sc.name, 3, {{{0, 1, 2}, "1"}});
  sc.embedding = coordinate_plane(3, "0");
  sc.sample_center = {0.0, 0.0};
  sc.random_points = true;
  sc.resample(11);
  return sc;
}

Scenario torus_constant_H(double c, const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.description = "flat 3-torus with H = " + fmt(c) + " dx1 dx2 dx3, e = 0";
  sc.ambient = euclidean(name, 3, {{{0, 1, 2}, fmt(c)}});
  sc.embedding = coordinate_plane(3, "0.25");
  sc.sample_center = {0.0, 0.0};
  sc.random_points = true;
  sc.resample(13);
  return sc;
}

Scenario linear_dilaton() {
  Scenario sc;
  sc.name = "linear_dilaton";
  sc.description = "flat R^3, e = 2 d(phi) with phi = 0.3 x1 + 0.4 x3";
  sc.ambient = euclidean(sc.name, 3, {}, {"0.3", "0", "0.4"});
  sc.embedding = coordinate_plane(3, "0");
  sc.sample_center = {0.0, 0.0};
  sc.random_points = true;
  sc.resample(17);
  return sc;
}

Scenario neutral_example(int m) {
  Scenario sc;
  sc.name = "neutral_flat_example_m" + std::to_string(m);
  sc.description = "flat neutral-signature structure on R^" + std::to_string(2 * m) + ", u > 1e-3";
  sc.ambient = neutral_flat_example(m);
  std::mt19937 rng(100 + m);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double u : {0.5, 0.8, 1.0, 1.5, 2.0}) {
    std::vector<double> p(2 * m);
    p[0] = u;
    for (int i = 1; i < 2 * m; ++i) p[i] = U(rng);
    sc.points.push_back(p);
  }
  return sc;
}

Scenario random_poly(std::uint64_t seed, int d) {
  if (d < 3) throw ScenarioError("random_poly needs d >= 3");
  Scenario sc;
  sc.name = "random_poly_" + std::to_string(seed) + "_" + std::to_string(d);
  sc.description = "seeded polynomial structure with a graph hypersurface";
  RandomOptions o;
  o.dim = d;
  o.seed = seed;
  sc.ambient = random_poly_structure(o);
  std::vector<std::string> s;
  auto F = random_graph_embedding(o, &s);
  sc.embedding = EmbeddingMap::from_strings(Chart("graph", s), F);
  sc.sample_center.assign(d - 1, 0.0);
  sc.random_points = true;
  sc.resample(seed);
  return sc;
}

double max_diff(const RealTensor& a, const RealTensor& b) { return max_abs_diff(a, b); }

void add_all(ResidualReport& into, const ResidualReport& from, const std::string& prefix) {
  for (auto e : from.entries) {
    e.name = prefix + e.name;
    into.entries.push_back(e);
  }
}

void identities(ResidualReport& rep, const Scenario& sc, const std::vector<double>& p, double tol,
                const std::string& prefix) {
  const Geometry geo = Geometry::at(sc.ambient, sc.ambient_point(p));
  const GenRiemann R = gen_riemann(geo);
  const RealTensor gi = values(geo.ginv);
  const GenRicciMixed tr = ricci_from_riemann(R, gi);
  const GenRicciMixed cf = gen_ricci_mixed(geo);
  const double sc_cf = gen_scalar(geo);
  rep.add(prefix + "ricci trace +", max_diff(tr.rc_plus, cf.rc_plus), tol);
  rep.add(prefix + "ricci trace -", max_diff(tr.rc_minus, cf.rc_minus), tol);
  rep.add(prefix + "scalar trace", std::fabs(scalar_from_riemann(R, gi) - sc_cf), tol);
  double sym = 0.0;
  for (int a = 0; a < geo.d; ++a)
    for (int b = 0; b < geo.d; ++b) sym = std::max(sym, std::fabs(cf.rc_plus(a, b) - cf.rc_minus(b, a)));
  rep.add(prefix + "ricci mixed symmetry", sym, tol);
  rep.add(prefix + "mixed trace", std::fabs(mixed_trace_identity(geo)), tol);
  double trc = 0.0;
  for (int a = 0; a < geo.d; ++a)
    for (int b = 0; b < geo.d; ++b) trc += gi(a, b) * cf.rc_plus(a, b);
  const double dxi = codifferential_xi(geo);
  const double div_rel = metric_divergence(geo, +1) - metric_divergence(geo, -1) + 2.0 * dxi;
  rep.add(prefix + "divergence relation", std::fabs(div_rel), tol);
  rep.add(prefix + "dilaton chain", std::fabs(sc_cf - trc - dilaton_eom(geo)), tol);
  if (sc.embedding) {
    const HypersurfaceJets hj = hypersurface_jets(sc.ambient, *sc.embedding, p);
    add_all(rep, gauss_residuals(hj, tol), prefix);
    add_all(rep, codazzi_residuals(hj, tol), prefix);
  }
}

void flatness(ResidualReport& rep, const Scenario& sc, const std::vector<double>& p, double tol,
              const std::string& prefix) {
  const FlatnessReport fr = flatness_report(sc.ambient, sc.ambient_point(p));
  for (const auto& [name, v] : fr.fields()) rep.add(prefix + name, v, tol);
}

void constraints(ResidualReport& rep, const Scenario& sc, const std::vector<double>& p, double tol,
                 const std::string& prefix) {
  if (!sc.embedding) throw ScenarioError("constraints suite needs a hypersurface");
  const HypersurfaceJets hj = hypersurface_jets(sc.ambient, *sc.embedding, p);
  const EnergyConstraint ec = energy_constraint(hj);
  const MomentumConstraint mc = momentum_constraint(hj);
  rep.add(prefix + "energy", ec.residual, tol);
  // The momentum identity assumes L_X g = 0 and d xi = H(X).
  if (compatibility_check(sc.ambient, nullptr, hj.ambient_point, tol).pass())
    rep.add(prefix + "momentum", mc.residual, tol);
  else
    rep.add(prefix + "momentum (frame form, pair not compatible)", mc.frame_residual, tol);
  ClassicalConstraints cc;
  try {
    cc = classical_constraints(hj);
  } catch (const GeometryError&) {
    return;  // no classical form for this dilaton
  }
  double mom = 0.0, flux = 0.0;
  for (int a = 0; a < hj.m; ++a) {
    mom = std::max(mom, std::fabs(cc.momentum(a) - 0.5 * (mc.lhs[0](a) + mc.lhs[1](a))));
    flux = std::max(flux, std::fabs(cc.flux(a) - (mc.lhs[1](a) - mc.lhs[0](a))));
  }
  rep.add(prefix + "classical energy vs generalised", std::fabs(cc.energy - ec.lhs[0]), tol);
  rep.add(prefix + "classical momentum vs generalised", mom, tol);
  rep.add(prefix + "classical flux vs generalised", flux, tol);
}

void fundamental(ResidualReport& rep, const Scenario& sc, const std::vector<double>& p, double tol,
                 const std::string& prefix) {
  if (!sc.embedding) throw ScenarioError("fundamental suite needs a hypersurface");
  HypersurfaceJets hj = hypersurface_jets(sc.ambient, *sc.embedding, p);
  hj.flat_ambient = true;
  add_all(rep, gauss_residuals(hj, tol), prefix + "flat ");
  add_all(rep, codazzi_residuals(hj, tol), prefix + "flat ");
}

ResidualReport reconstruction_report(const Scenario& sc) {
  ResidualReport rep;
  rep.scenario = sc.name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Immersion im = reconstruct_immersion(*sc.fundamental, *sc.grid);
    rep.add("reconstruction gauss-codazzi", im.max_gc_residual, kReconstructionGcTol);
    rep.add("reconstruction path residual", im.path_residual, 1e-6);
    rep.add("reconstruction metric residual", im.metric_residual, 1e-6);
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

bool applicable(Suite s, const Scenario& sc) {
  switch (s) {
    case Suite::Flatness:
      return sc.ambient.dim() >= 3;
    case Suite::Constraints:
    case Suite::Fundamental:
      return sc.embedding.has_value();
    default:
      return true;
  }
}

// JSON helpers with path-qualified errors.
[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ScenarioError(path + ": " + what); }

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path, "missing field '" + key + "'");
  return j.at(key);
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

const json& as_array(const json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
  if (!j.is_array()) fail(path, "expected an array");
  if (size && j.size() != *size) fail(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
  return j;
}

Expr as_expr(const json& j, const std::string& path, const std::vector<std::string>& chart) {
  const std::string text = as_string(j, path);
  try {
    return parse(text, chart);
  } catch (const ParseError& e) {
    fail(path, e.what());
  }
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  std::vector<std::string> out;
  const json& a = as_array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_string(a[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<std::string>> expr_matrix(const json& j, const std::string& path,
                                                  const std::vector<std::string>& chart) {
  const std::size_t n = chart.size();
  std::vector<std::vector<std::string>> out(n, std::vector<std::string>(n));
  as_array(j, path, n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::string row = path + "[" + std::to_string(a) + "]";
    as_array(j[a], row, n);
    for (std::size_t b = 0; b < n; ++b) {
      const std::string cell = row + "[" + std::to_string(b) + "]";
      as_expr(j[a][b], cell, chart);
      out[a][b] = j[a][b].get<std::string>();
    }
  }
  return out;
}

std::vector<double> number_list(const json& j, const std::string& path, std::size_t n) {
  as_array(j, path, n);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

int index_token(const std::string& tok, const Chart& chart, const std::string& path) {
  const int named = chart.index_of(tok);
  if (named >= 0) return named;
  try {
    std::size_t used = 0;
    const int i = std::stoi(tok, &used);
    if (used == tok.size() && i >= 0 && i < chart.dim()) return i;
  } catch (const std::exception&) {
  }
  fail(path, "bad index '" + tok + "'");
}

}  // namespace

std::vector<double> Scenario::ambient_point(const std::vector<double>& p) const {
  return embedding ? embedding->image(p) : p;
}

void Scenario::resample(std::uint64_t seed, int count) {
  points = shifted_points(seed, sample_center, count, sample_radius);
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  out.push_back(flat_trivial(3));
  out.push_back(flat_trivial(4));
  out.push_back(sphere_in_flat(3));
  out.push_back(sphere_in_flat(4));
  out.push_back(cylinder_in_flat());
  out.push_back(hyperplane_with_flux());
  out.push_back(torus_constant_H(2.0, "torus_constant_H"));
  out.push_back(linear_dilaton());
  out.push_back(neutral_example(2));
  out.push_back(neutral_example(3));
  out.push_back(random_poly(42, 3));
  out.push_back(random_poly(42, 4));
  return out;
}

Scenario find_scenario(const std::string& name) {
  std::smatch m;
  if (name == "cylinder_in_flat") return cylinder_in_flat();
  if (name == "hyperplane_with_flux") return hyperplane_with_flux();
  if (name == "linear_dilaton") return linear_dilaton();
  if (name == "torus_constant_H") return torus_constant_H(2.0, name);
  if (std::regex_match(name, m, std::regex(R"(flat_trivial_(\d+))"))) return flat_trivial(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(sphere_in_flat_(\d+))"))) return sphere_in_flat(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(torus_constant_H_([-+]?[0-9]*\.?[0-9]+))")))
    return torus_constant_H(std::stod(m[1]), name);
  if (std::regex_match(name, m, std::regex(R"(neutral_flat_example_m(\d+))"))) {
    const int k = std::stoi(m[1]);
    if (k < 2) throw ScenarioError("neutral_flat_example needs m >= 2");
    return neutral_example(k);
  }
  if (std::regex_match(name, m, std::regex(R"(random_poly_(\d+)_(\d+))")))
    return random_poly(std::stoull(m[1]), std::stoi(m[2]));
  throw ScenarioError("unknown scenario '" + name + "'");
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("$", "expected an object");
  Scenario sc;
  sc.name = as_string(field(j, "name", "$"), "$.name");
  const int d = as_int(field(j, "dim", "$"), "$.dim");
  const std::vector<std::string> coords = string_list(field(j, "coords", "$"), "$.coords");
  if (static_cast<int>(coords.size()) != d) fail("$.coords", "expected " + std::to_string(d) + " coordinates");
  Chart chart(sc.name, coords);
  try {
    chart.validate();
  } catch (const std::exception& e) {
    fail("$.coords", e.what());
  }
  if (j.contains("domain")) {
    const json& dom = j["domain"];
    if (!dom.is_object()) fail("$.domain", "expected an object");
    for (const auto& [c, iv] : dom.items()) {
      const auto lohi = number_list(iv, "$.domain." + c, 2);
      try {
        chart.set_domain(c, lohi[0], lohi[1]);
      } catch (const std::exception& e) {
        fail("$.domain." + c, e.what());
      }
    }
  }
  const auto sig = number_list(field(j, "signature", "$"), "$.signature", 2);
  const int p = static_cast<int>(sig[0]), q = static_cast<int>(sig[1]);
  if (p < 0 || q < 0 || p + q != d) fail("$.signature", "entries must be non-negative and sum to dim");

  sc.ambient.chart = chart;
  const auto metric = expr_matrix(field(j, "metric", "$"), "$.metric", coords);
  try {
    sc.ambient.g = MetricField::from_strings(chart, metric, p, q);
  } catch (const std::exception& e) {
    fail("$.metric", e.what());
  }
  if (j.contains("H")) {
    const json& H = j["H"];
    if (!H.is_object()) fail("$.H", "expected an object");
    for (const auto& [key, val] : H.items()) {
      const std::string path = "$.H[\"" + key + "\"]";
      std::vector<int> idx;
      std::stringstream ss(key);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(' '));
        tok.erase(tok.find_last_not_of(' ') + 1);
        idx.push_back(index_token(tok, chart, path));
      }
      if (idx.size() != 3) fail(path, "expected three indices");
      try {
        sc.ambient.H.add(idx[0], idx[1], idx[2], as_expr(val, path, coords));
      } catch (const std::invalid_argument& e) {
        fail(path, e.what());
      }
    }
  }
  if (j.contains("dilaton")) {
    const json& dl = j["dilaton"];
    if (!dl.is_object()) fail("$.dilaton", "expected an object");
    for (const char* key : {"X", "xi"}) {
      if (!dl.contains(key)) continue;
      const std::string path = std::string("$.dilaton.") + key;
      as_array(dl[key], path, static_cast<std::size_t>(d));
      std::vector<Expr> v;
      for (int i = 0; i < d; ++i) v.push_back(as_expr(dl[key][i], path + "[" + std::to_string(i) + "]", coords));
      (std::string(key) == "X" ? sc.ambient.dilaton.X : sc.ambient.dilaton.xi) = v;
    }
  }
  int point_dim = d;
  if (j.contains("hypersurface")) {
    const json& hs = j["hypersurface"];
    if (!hs.is_object()) fail("$.hypersurface", "expected an object");
    const auto sc_coords = string_list(field(hs, "coords", "$.hypersurface"), "$.hypersurface.coords");
    if (static_cast<int>(sc_coords.size()) != d - 1) fail("$.hypersurface.coords", "expected dim - 1 coordinates");
    Chart sigma(sc.name + "_sigma", sc_coords);
    try {
      sigma.validate();
    } catch (const std::exception& e) {
      fail("$.hypersurface.coords", e.what());
    }
    const json& emb = field(hs, "embedding", "$.hypersurface");
    as_array(emb, "$.hypersurface.embedding", static_cast<std::size_t>(d));
    EmbeddingMap em;
    em.sigma_chart = sigma;
    for (int i = 0; i < d; ++i)
      em.F.push_back(as_expr(emb[i], "$.hypersurface.embedding[" + std::to_string(i) + "]", sc_coords));
    if (hs.contains("orientation")) {
      em.orientation = as_int(hs["orientation"], "$.hypersurface.orientation");
      if (em.orientation != 1 && em.orientation != -1) fail("$.hypersurface.orientation", "expected 1 or -1");
    }
    sc.embedding = em;
    point_dim = d - 1;
    if (hs.contains("domain")) {
      const json& dom = hs["domain"];
      for (const auto& [c, iv] : dom.items()) {
        const auto lohi = number_list(iv, "$.hypersurface.domain." + c, 2);
        try {
          sc.embedding->sigma_chart.set_domain(c, lohi[0], lohi[1]);
        } catch (const std::exception& e) {
          fail("$.hypersurface.domain." + c, e.what());
        }
      }
    }
  }
  if (j.contains("points")) {
    const json& pts = as_array(j["points"], "$.points");
    for (std::size_t i = 0; i < pts.size(); ++i)
      sc.points.push_back(number_list(pts[i], "$.points[" + std::to_string(i) + "]", point_dim));
  } else {
    sc.random_points = true;
    sc.sample_center.assign(point_dim, 0.0);
    if (j.contains("sample_center")) sc.sample_center = number_list(j["sample_center"], "$.sample_center", point_dim);
    if (j.contains("sample_radius")) sc.sample_radius = as_number(j["sample_radius"], "$.sample_radius");
    const std::uint64_t seed = j.contains("seed") ? static_cast<std::uint64_t>(as_int(j["seed"], "$.seed")) : 1;
    sc.resample(seed);
  }
  if (sc.points.empty()) fail("$.points", "no sample points");
  if (j.contains("tolerances")) {
    for (const auto& [k, v] : j["tolerances"].items()) {
      try {
        parse_suite(k);
      } catch (const ScenarioError&) {
        fail("$.tolerances." + k, "unknown suite");
      }
      sc.tolerances[k] = as_number(v, "$.tolerances." + k);
    }
  }
  if (j.contains("fundamental")) {
    const json& f = j["fundamental"];
    const auto fc = string_list(field(f, "coords", "$.fundamental"), "$.fundamental.coords");
    if (fc.size() != 2) fail("$.fundamental.coords", "expected two coordinates");
    const auto h = expr_matrix(field(f, "h", "$.fundamental"), "$.fundamental.h", fc);
    const auto k = expr_matrix(field(f, "k", "$.fundamental"), "$.fundamental.k", fc);
    sc.fundamental = HypersurfaceData::classical(Chart(sc.name + "_data", fc), h, k);
    const json& g = field(f, "grid", "$.fundamental");
    const auto u = number_list(field(g, "u", "$.fundamental.grid"), "$.fundamental.grid.u", 2);
    const auto v = number_list(field(g, "v", "$.fundamental.grid"), "$.fundamental.grid.v", 2);
    const int n = g.contains("n") ? as_int(g["n"], "$.fundamental.grid.n") : 33;
    sc.grid = GridSpec{u[0], u[1], v[0], v[1], n};
  }
  validate_scenario(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void validate_scenario(const Scenario& sc) {
  for (const auto& p : sc.points) {
    const std::string where = " at point " + point_text(p);
    std::vector<double> q = p;
    if (sc.embedding) {
      if (!sc.embedding->sigma_chart.contains(p)) throw ScenarioError("point outside the hypersurface domain" + where);
      q = sc.embedding->image(p);
    }
    if (!sc.ambient.chart.contains(q)) throw ScenarioError("point outside the domain" + where);
    try {
      const Geometry geo = Geometry::at(sc.ambient, q);
      const double dH = dH_residual(geo);
      if (dH > 1e-8) throw ScenarioError("dH residual " + fmt(dH) + where);
      if (sc.embedding) hypersurface_jets(sc.ambient, *sc.embedding, p);
    } catch (const GeometryError& e) {
      throw ScenarioError(std::string(e.what()) + where);
    } catch (const DomainError& e) {
      throw ScenarioError(std::string(e.what()) + where);
    }
  }
}

Suite parse_suite(const std::string& name) {
  if (name == "identities") return Suite::Identities;
  if (name == "flatness") return Suite::Flatness;
  if (name == "constraints") return Suite::Constraints;
  if (name == "fundamental") return Suite::Fundamental;
  if (name == "all") return Suite::All;
  throw ScenarioError("unknown suite '" + name + "'");
}

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Identities:
      return "identities";
    case Suite::Flatness:
      return "flatness";
    case Suite::Constraints:
      return "constraints";
    case Suite::Fundamental:
      return "fundamental";
    case Suite::All:
      return "all";
  }
  return "?";
}

double default_tolerance(Suite s) { return s == Suite::Flatness ? 1e-8 : 1e-7; }

ResidualReport evaluate_point(Suite suite, const Scenario& sc, const std::vector<double>& point,
                              std::optional<double> tol) {
  ResidualReport rep;
  rep.scenario = sc.name;
  rep.point = point;
  const auto t0 = std::chrono::steady_clock::now();
  auto tolerance = [&](Suite s) {
    if (tol) return *tol;
    auto it = sc.tolerances.find(suite_name(s));
    return it != sc.tolerances.end() ? it->second : default_tolerance(s);
  };
  auto run = [&](Suite s, const std::string& prefix) {
    switch (s) {
      case Suite::Identities:
        identities(rep, sc, point, tolerance(s), prefix);
        break;
      case Suite::Flatness:
        flatness(rep, sc, point, tolerance(s), prefix);
        break;
      case Suite::Constraints:
        constraints(rep, sc, point, tolerance(s), prefix);
        break;
      case Suite::Fundamental:
        fundamental(rep, sc, point, tolerance(s), prefix);
        break;
      case Suite::All:
        break;
    }
  };
  try {
    if (suite == Suite::All) {
      for (Suite s : {Suite::Identities, Suite::Flatness, Suite::Constraints, Suite::Fundamental})
        if (applicable(s, sc)) run(s, std::string(suite_name(s)) + ": ");
    } else {
      run(suite, "");
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<ResidualReport> run_suite(Suite suite, const Scenario& sc, std::optional<double> tol) {
  std::vector<std::future<ResidualReport>> jobs;
  for (const auto& p : sc.points)
    jobs.push_back(std::async(std::launch::async, [&, p] { return evaluate_point(suite, sc, p, tol); }));
  std::vector<ResidualReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  if ((suite == Suite::Fundamental || suite == Suite::All) && sc.fundamental && sc.grid)
    out.push_back(reconstruction_report(sc));
  return out;
}

std::string reports_json(const std::string& scenario, const std::string& suite,
                         const std::vector<ResidualReport>& reports) {
  json j;
  j["scenario"] = scenario;
  j["suite"] = suite;
  bool all = true;
  json arr = json::array();
  for (const auto& r : reports) {
    json jr;
    jr["point"] = r.point;
    jr["pass"] = r.pass();
    if (!r.error.empty()) jr["error"] = r.error;
    json entries = json::array();
    for (const auto& e : r.entries)
      entries.push_back({{"name", e.name}, {"residual", e.residual}, {"tolerance", e.tolerance}, {"pass", e.pass}});
    jr["entries"] = entries;
    arr.push_back(jr);
    all = all && r.pass();
  }
  j["pass"] = all;
  j["reports"] = arr;
  return j.dump(2) + "\n";
}

std::string reports_table(const std::vector<ResidualReport>& reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << r.scenario << " " << (r.point.empty() ? std::string("(grid)") : point_text(r.point)) << "  "
       << (r.pass() ? "PASS" : "FAIL") << "  " << std::fixed << std::setprecision(3) << r.wall_time << " s\n";
    os.unsetf(std::ios::fixed);
    if (!r.error.empty()) os << "  error: " << r.error << "\n";
    std::size_t w = 0;
    for (const auto& e : r.entries) w = std::max(w, e.name.size());
    for (const auto& e : r.entries)
      os << "  " << std::left << std::setw(static_cast<int>(w)) << e.name << "  " << std::right << std::scientific
         << std::setprecision(3) << e.residual << "  tol " << e.tolerance << "  " << (e.pass ? "ok" : "FAIL") << "\n"
         << std::defaultfloat;
  }
  return os.str();
}

std::string mesh_json(const Immersion& im) {
  json j;
  j["grid"] = {im.grid.n, im.grid.n};
  json pts = json::array();
  for (const auto& p : im.F) pts.push_back({p[0], p[1], p[2]});
  j["points"] = pts;
  j["diagnostics"] = {{"path_residual", im.path_residual}, {"metric_residual", im.metric_residual}};
  return j.dump() + "\n";
}

}  // namespace gcurv
