#include "gcurv/fields.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace gcurv {

Chart::Chart(std::string n, std::vector<std::string> c) : name(std::move(n)), coords(std::move(c)) {
  const double inf = std::numeric_limits<double>::infinity();
  domain.assign(coords.size(), {-inf, inf});
}

int Chart::index_of(const std::string& coord) const {
  for (int i = 0; i < dim(); ++i) {
    if (coords[i] == coord) return i;
  }
  return -1;
}

void Chart::set_domain(const std::string& coord, double lo, double hi) {
  int i = index_of(coord);
  if (i < 0) throw std::invalid_argument("domain given for unknown coordinate '" + coord + "'");
  if (!(lo < hi)) throw std::invalid_argument("empty domain interval for '" + coord + "'");
  domain.resize(coords.size(), {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
  domain[i] = {lo, hi};
}

bool Chart::contains(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (i < static_cast<int>(domain.size()) && !(point[i] > domain[i].first && point[i] < domain[i].second)) {
      return false;
    }
  }
  return true;
}

void Chart::validate() const {
  if (dim() < 2) throw std::invalid_argument("chart '" + name + "' needs dimension >= 2");
  if (dim() > kMaxJetDim) throw std::invalid_argument("chart dimension exceeds " + std::to_string(kMaxJetDim));
  for (int i = 0; i < dim(); ++i) {
    for (int j = i + 1; j < dim(); ++j) {
      if (coords[i] == coords[j]) throw std::invalid_argument("duplicate coordinate '" + coords[i] + "'");
    }
  }
}

MetricField MetricField::from_strings(const Chart& chart, const std::vector<std::vector<std::string>>& m, int p,
                                      int q) {
  const int d = chart.dim();
  if (static_cast<int>(m.size()) != d) throw std::invalid_argument("metric must have one row per coordinate");
  if (p + q != d) throw std::invalid_argument("signature does not add up to the dimension");
  MetricField g;
  g.p = p;
  g.q = q;
  g.comps.assign(d, std::vector<Expr>(d));
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(m[i].size()) != d) throw std::invalid_argument("metric row " + std::to_string(i) + " has wrong length");
    for (int j = i; j < d; ++j) {
      Expr e = parse(m[i][j], chart.coords);
      g.comps[i][j] = e;
      g.comps[j][i] = e;
    }
  }
  return g;
}

void ThreeFormField::add(int i, int j, int k, Expr e) {
  int idx[3] = {i, j, k};
  int sign = 1;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 2 - a; ++b) {
      if (idx[b] > idx[b + 1]) {
        std::swap(idx[b], idx[b + 1]);
        sign = -sign;
      }
    }
  }
  if (idx[0] == idx[1] || idx[1] == idx[2]) throw std::invalid_argument("three-form component with repeated index");
  if (sign < 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Neg;
    n->lhs = std::make_shared<const ExprNode>(e.root());
    n->length = e.source().size();
    e = Expr(n, e.source(), e.chart());
  }
  for (auto& c : comps) {
    if (c.i == idx[0] && c.j == idx[1] && c.k == idx[2]) throw std::invalid_argument("duplicate three-form component");
  }
  comps.push_back({idx[0], idx[1], idx[2], std::move(e)});
}

AmbientStructure make_ambient(const std::string& name, const std::vector<std::string>& coords,
                              const std::vector<std::vector<std::string>>& metric, int p, int q,
                              const std::vector<HComponent>& H, const std::vector<std::string>& X,
                              const std::vector<std::string>& xi) {
  AmbientStructure amb;
  amb.chart = Chart(name, coords);
  amb.chart.validate();
  amb.g = MetricField::from_strings(amb.chart, metric, p, q);
  for (const auto& c : H) amb.H.add(c.idx[0], c.idx[1], c.idx[2], parse(c.expr, coords));
  const std::size_t d = coords.size();
  if (!X.empty() && X.size() != d) throw std::invalid_argument("X needs one component per coordinate");
  if (!xi.empty() && xi.size() != d) throw std::invalid_argument("xi needs one component per coordinate");
  for (const auto& e : X) amb.dilaton.X.push_back(parse(e, coords));
  for (const auto& e : xi) amb.dilaton.xi.push_back(parse(e, coords));
  return amb;
}

FieldJets evaluate_fields(const AmbientStructure& amb, const std::vector<double>& point, int order) {
  const int d = amb.dim();
  if (static_cast<int>(point.size()) != d) throw std::invalid_argument("point dimension does not match chart");
  if (!amb.chart.contains(point)) throw GeometryError("point outside the domain of chart '" + amb.chart.name + "'");
  FieldJets f;
  f.dim = d;
  const Jet zero = Jet::zero(d, order);
  f.g = JetTensor::cube(d, 2, zero);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Jet v = amb.g.comps.at(i).at(j).eval(point, order);
      f.g(i, j) = v;
      f.g(j, i) = v;
    }
  }
  f.H = JetTensor::cube(d, 3, zero);
  for (const auto& c : amb.H.comps) {
    Jet v = c.e.eval(point, order);
    const int a = c.i, b = c.j, e = c.k;
    f.H(a, b, e) = v;
    f.H(b, e, a) = v;
    f.H(e, a, b) = v;
    f.H(b, a, e) = -v;
    f.H(a, e, b) = -v;
    f.H(e, b, a) = -v;
  }
  f.X = JetTensor::cube(d, 1, zero);
  f.xi = JetTensor::cube(d, 1, zero);
  for (int i = 0; i < static_cast<int>(amb.dilaton.X.size()); ++i) f.X(i) = amb.dilaton.X[i].eval(point, order);
  for (int i = 0; i < static_cast<int>(amb.dilaton.xi.size()); ++i) f.xi(i) = amb.dilaton.xi[i].eval(point, order);
  f.X.with_variance("u");
  return f;
}

JetTensor inverse(const JetTensor& a) {
  const int n = a.extent(0);
  JetTensor m = a;
  JetTensor inv = JetTensor::cube(n, 2, Jet(0.0));
  for (int i = 0; i < n; ++i) inv(i, i) = Jet(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(m(r, col).value()) > std::fabs(m(piv, col).value())) piv = r;
    }
    if (m(piv, col).value() == 0.0) throw GeometryError("singular matrix in jet inverse");
    if (piv != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(m(piv, c), m(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    }
    Jet r = reciprocal(m(col, col));
    for (int c = 0; c < n; ++c) {
      m(col, c) = m(col, c) * r;
      inv(col, c) = inv(col, c) * r;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      Jet f = m(row, col);
      if (f.value() == 0.0 && f.is_constant()) continue;
      for (int c = 0; c < n; ++c) {
        m(row, c) -= f * m(col, c);
        inv(row, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

namespace {
Eigen::MatrixXd to_eigen(const RealTensor& a) {
  const int n = a.extent(0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
  }
  return m;
}
}  // namespace

double determinant(const RealTensor& a) { return to_eigen(a).determinant(); }

std::pair<int, int> signature_of(const RealTensor& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  int p = 0, q = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()(i);
    if (ev > tol) ++p;
    if (ev < -tol) ++q;
  }
  return {p, q};
}

void check_metric(const RealTensor& g, std::optional<std::pair<int, int>> signature) {
  double det = determinant(g);
  if (!(std::fabs(det) > kDegeneracyTol)) {
    std::ostringstream os;
    os << "degenerate metric: det g = " << det;
    throw GeometryError(os.str());
  }
  if (signature) {
    auto s = signature_of(g);
    if (s != *signature) {
      std::ostringstream os;
      os << "signature mismatch: expected (" << signature->first << "," << signature->second << "), found ("
         << s.first << "," << s.second << ")";
      throw GeometryError(os.str());
    }
  }
}

Geometry Geometry::from_fields(const FieldJets& f, std::optional<std::pair<int, int>> signature) {
  Geometry geo;
  const int d = f.dim;
  geo.d = d;
  geo.g = f.g;
  check_metric(values(f.g), signature);
  geo.ginv = inverse(f.g);
  geo.ginv.with_variance("uu");

  // Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
  std::vector<JetTensor> dg(d);
  for (int m = 0; m < d; ++m) dg[m] = partial(f.g, m);
  JetTensor lowered = JetTensor::cube(d, 3);  // Gamma_{l,ij}
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        Jet v = 0.5 * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        lowered(l, i, j) = v;
        lowered(l, j, i) = v;
      }
    }
  }
  geo.gamma = JetTensor::cube(d, 3);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        Jet s(0.0);
        for (int l = 0; l < d; ++l) s += geo.ginv(k, l) * lowered(l, i, j);
        geo.gamma(k, i, j) = s;
        geo.gamma(k, j, i) = s;
      }
    }
  }

  geo.H = f.H;
  geo.Hup = JetTensor::cube(d, 3);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        Jet s(0.0);
        for (int l = 0; l < d; ++l) s += geo.ginv(k, l) * f.H(i, j, l);
        geo.Hup(i, j, k) = s;
      }
    }
  }
  geo.Hup.with_variance("ddu");

  geo.X = f.X;
  geo.xi = f.xi;
  geo.pe_plus = JetTensor::cube(d, 1);
  geo.pe_minus = JetTensor::cube(d, 1);
  for (int i = 0; i < d; ++i) {
    Jet s(0.0);
    for (int l = 0; l < d; ++l) s += geo.ginv(i, l) * f.xi(l);
    geo.pe_plus(i) = f.X(i) + s;
    geo.pe_minus(i) = f.X(i) - s;
  }
  geo.X.with_variance("u");
  geo.pe_plus.with_variance("u");
  geo.pe_minus.with_variance("u");
  return geo;
}

Geometry Geometry::at(const AmbientStructure& amb, const std::vector<double>& point) {
  return from_fields(evaluate_fields(amb, point), std::make_pair(amb.g.p, amb.g.q));
}

MetricAt metric_at(const AmbientStructure& amb, const std::vector<double>& point) {
  FieldJets f = evaluate_fields(amb, point);
  Geometry geo = Geometry::from_fields(f, std::make_pair(amb.g.p, amb.g.q));
  const int d = geo.d;
  MetricAt m;
  m.g = values(geo.g);
  m.g_inv = values(geo.ginv);
  m.dg = RealTensor::cube(d, 3);
  m.d2g = RealTensor::cube(d, 4);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        m.dg(k, i, j) = geo.g(i, j).d(k);
        for (int l = 0; l < d; ++l) m.d2g(k, l, i, j) = geo.g(i, j).d(k, l);
      }
    }
  }
  return m;
}

RealTensor exterior_derivative3(const JetTensor& H) {
  const int d = H.extent(0);
  RealTensor dH = RealTensor::cube(d, 4);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          dH(i, j, k, l) = H(j, k, l).d(i) - H(i, k, l).d(j) + H(i, j, l).d(k) - H(i, j, k).d(l);
        }
      }
    }
  }
  return dH;
}

double dH_residual(const Geometry& geo) { return max_abs(exterior_derivative3(geo.H)); }

HContractions h_contractions(const Geometry& geo) {
  const int d = geo.d;
  const RealTensor gi = values(geo.ginv);
  const RealTensor H = values(geo.H);
  HContractions c;
  c.H = H;
  c.dH = exterior_derivative3(geo.H);
  // H(X,Y,.) with last index raised
  RealTensor Hu = values(geo.Hup);
  c.H2form = RealTensor::cube(d, 4);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int v = 0; v < d; ++v) {
        for (int w = 0; w < d; ++w) {
          double s = 0.0;
          for (int k = 0; k < d; ++k) s += H(a, b, k) * Hu(v, w, k);
          c.H2form(a, b, v, w) = s;
        }
      }
    }
  }
  c.Hsq = RealTensor::cube(d, 2);
  for (int x = 0; x < d; ++x) {
    for (int y = 0; y < d; ++y) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) s += gi(i, j) * c.H2form(x, i, y, j);
      }
      c.Hsq(x, y) = s;
    }
  }
  double n = 0.0;
  for (int x = 0; x < d; ++x) {
    for (int y = 0; y < d; ++y) n += gi(x, y) * c.Hsq(x, y);
  }
  c.normH2 = n;
  return c;
}

HContractions h_contractions(const AmbientStructure& amb, const std::vector<double>& point) {
  return h_contractions(Geometry::at(amb, point));
}

DilatonSplit dilaton_split(const Geometry& geo) {
  const int d = geo.d;
  const RealTensor g = values(geo.g);
  DilatonSplit s;
  s.pi_e_plus = values(geo.pe_plus);
  s.pi_e_minus = values(geo.pe_minus);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s.e_plus_sq += g(i, j) * s.pi_e_plus(i) * s.pi_e_plus(j);
      s.e_minus_sq += g(i, j) * s.pi_e_minus(i) * s.pi_e_minus(j);
    }
  }
  // e = e_+ + e_- with G(e_pm, e_pm) = |pi e_pm|^2 through the sigma isometries.
  s.e_pairing = s.e_plus_sq + s.e_minus_sq;
  return s;
}

DilatonSplit dilaton_split(const AmbientStructure& amb, const std::vector<double>& point) {
  return dilaton_split(Geometry::at(amb, point));
}

RealTensor lower(const RealTensor& v, const RealTensor& g) {
  const int d = v.extent(0);
  RealTensor r = RealTensor::cube(d, 1);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += g(i, j) * v(j);
    r(i) = s;
  }
  return r;
}

double contract2(const RealTensor& a, const RealTensor& b, const RealTensor& ginv) {
  const int d = a.extent(0);
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) s += a(i, j) * b(k, l) * ginv(i, k) * ginv(j, l);
      }
    }
  }
  return s;
}

}  // namespace gcurv
