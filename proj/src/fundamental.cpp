#include "gcurv/fundamental.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gcurv/classical.hpp"

namespace gcurv {

HypersurfaceData HypersurfaceData::classical(const Chart& chart, const std::vector<std::vector<std::string>>& h,
                                             const std::vector<std::vector<std::string>>& k) {
  const int m = chart.dim();
  HypersurfaceData data;
  data.sigma = make_ambient(chart.name, chart.coords, h, m, 0);
  data.sigma.chart = chart;
  if (static_cast<int>(k.size()) != m) throw GeometryError("k needs one row per coordinate");
  data.k.assign(m, std::vector<Expr>(m));
  for (int a = 0; a < m; ++a) {
    if (static_cast<int>(k[a].size()) != m) throw GeometryError("k needs one column per coordinate");
    for (int b = 0; b < m; ++b) data.k[a][b] = parse(k[a][b], chart.coords);
  }
  return data;
}

HypersurfaceJets hypersurface_jets(const HypersurfaceData& data, const std::vector<double>& point) {
  const int m = data.dim();
  if (m < 2) throw GeometryError("hypersurface must have dimension at least 2");
  if (static_cast<int>(data.k.size()) != m) throw GeometryError("k has the wrong size");
  HypersurfaceJets hj;
  hj.d = m + 1;
  hj.m = m;
  hj.sigma_point = point;
  hj.epsilon = data.epsilon;
  hj.flat_ambient = true;
  hj.sigma = Geometry::from_fields(evaluate_fields(data.sigma, point),
                                   std::make_pair(data.sigma.g.p, data.sigma.g.q));

  hj.k = JetTensor::cube(m, 2);
  hj.H_perp = JetTensor::cube(m, 2);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      const Jet v = data.k[a][b].eval(point);
      if (std::fabs(v.value() - data.k[b][a].value(point)) > 1e-12) throw GeometryError("k is not symmetric");
      hj.k(a, b) = hj.k(b, a) = v;
      if (!data.H_perp.empty() && b > a) {
        const Jet w = data.H_perp[a][b].eval(point);
        hj.H_perp(a, b) = w;
        hj.H_perp(b, a) = -w;
      }
    }
  hj.e_perp[0] = data.e_perp_plus.eval(point);
  hj.e_perp[1] = data.e_perp_minus.eval(point);
  hj.x = Jet(0.0);
  fill_shape_blocks(hj);
  return hj;
}

ResidualReport flat_gc_residual(const HypersurfaceData& data, const std::vector<double>& point, double tol) {
  const HypersurfaceJets hj = hypersurface_jets(data, point);
  ResidualReport rep = gauss_residuals(hj, tol);
  for (const auto& e : codazzi_residuals(hj, tol).entries) rep.entries.push_back(e);
  rep.scenario = "flat gauss-codazzi";
  return rep;
}

ClassicalGC classical_flat_gc_residual(const HypersurfaceData& data, const std::vector<double>& point) {
  const int m = data.dim();
  const Geometry geo =
      Geometry::from_fields(evaluate_fields(data.sigma, point), std::make_pair(data.sigma.g.p, data.sigma.g.q));
  const RealTensor Rm = values(riemann(geo));
  JetTensor k = JetTensor::cube(m, 2);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) k(a, b) = data.k[a][b].eval(point);
  k.with_variance("dd");
  const RealTensor kv = values(k);
  const RealTensor Dk = values(covariant_derivative(k, connection(geo, Torsion::LeviCivita)));

  ClassicalGC r;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        r.codazzi = std::max(r.codazzi, std::fabs(Dk(a, b, c) - Dk(b, a, c)));
        for (int e = 0; e < m; ++e)
          r.gauss = std::max(r.gauss, std::fabs(Rm(a, b, c, e) - kv(a, c) * kv(b, e) + kv(a, e) * kv(b, c)));
      }
  return r;
}

namespace {

using Vec3 = std::array<double, 3>;

struct State {
  Frame3 E{};  // columns
  Vec3 F{};
};

State axpy(const State& y, double h, const State& k) {
  State r = y;
  for (int c = 0; c < 3; ++c)
    for (int r_ = 0; r_ < 3; ++r_) r.E[c][r_] += h * k.E[c][r_];
  for (int i = 0; i < 3; ++i) r.F[i] += h * k.F[i];
  return r;
}

// Frame derivative along d_c: column b of M holds the frame components of
// nabla~_{d_c} (d_u, d_v, n)_b, so d/dt E = E M.
class FrameField {
 public:
  explicit FrameField(const HypersurfaceData& data) : data_(data) {}

  std::array<std::array<double, 3>, 3> matrix(const std::vector<double>& p, int c) const {
    JetTensor h = JetTensor::cube(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) h(a, b) = data_.sigma.g.comps[a][b].eval(p, 1);
    const RealTensor hv = values(h);
    const double det = hv(0, 0) * hv(1, 1) - hv(0, 1) * hv(1, 0);
    const double hi[2][2] = {{hv(1, 1) / det, -hv(0, 1) / det}, {-hv(1, 0) / det, hv(0, 0) / det}};
    double k[2][2];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) k[a][b] = data_.k[a][b].value(p);
    std::array<std::array<double, 3>, 3> M{};  // M[row][col]
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        // Gamma^a_cb
        double g = 0.0;
        for (int e = 0; e < 2; ++e)
          g += 0.5 * hi[a][e] * (h(e, b).d(c) + h(e, c).d(b) - h(c, b).d(e));
        M[a][b] = g;
      }
      M[2][b] = -k[c][b];
    }
    for (int a = 0; a < 2; ++a) M[a][2] = hi[a][0] * k[0][c] + hi[a][1] * k[1][c];
    return M;
  }

  State rhs(const std::vector<double>& p, int c, const State& y) const {
    const auto M = matrix(p, c);
    State r;
    for (int col = 0; col < 3; ++col)
      for (int row = 0; row < 3; ++row) {
        double v = 0.0;
        for (int q = 0; q < 3; ++q) v += y.E[q][row] * M[q][col];
        r.E[col][row] = v;
      }
    r.F = y.E[c];
    return r;
  }

  State step(std::vector<double> p, int c, double h, const State& y) const {
    const State k1 = rhs(p, c, y);
    std::vector<double> mid = p;
    mid[c] += 0.5 * h;
    const State k2 = rhs(mid, c, axpy(y, 0.5 * h, k1));
    const State k3 = rhs(mid, c, axpy(y, 0.5 * h, k2));
    std::vector<double> end = p;
    end[c] += h;
    const State k4 = rhs(end, c, axpy(y, h, k3));
    State r = y;
    r = axpy(r, h / 6.0, k1);
    r = axpy(r, h / 3.0, k2);
    r = axpy(r, h / 3.0, k3);
    r = axpy(r, h / 6.0, k4);
    return r;
  }

 private:
  const HypersurfaceData& data_;
};

// first == 0: along u first, then v from each node of the bottom row.
std::vector<State> integrate(const FrameField& ff, const GridSpec& g, const State& seed, int first) {
  const int n = g.n, second = 1 - first;
  const double hs[2] = {g.du(), g.dv()};
  std::vector<State> out(static_cast<std::size_t>(n) * n);
  auto idx = [&](int along_first, int along_second) {
    return first == 0 ? along_first * n + along_second : along_second * n + along_first;
  };
  auto node = [&](int along_first, int along_second) {
    return first == 0 ? g.at(along_first, along_second) : g.at(along_second, along_first);
  };
  out[idx(0, 0)] = seed;
  for (int i = 1; i < n; ++i) out[idx(i, 0)] = ff.step(node(i - 1, 0), first, hs[first], out[idx(i - 1, 0)]);
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < n; ++j) out[idx(i, j)] = ff.step(node(i, j - 1), second, hs[second], out[idx(i, j - 1)]);
  return out;
}

}  // namespace

Immersion reconstruct_immersion(const HypersurfaceData& data, const GridSpec& grid) {
  if (data.dim() != 2) throw GeometryError("reconstruction needs a 2-dimensional chart");
  if (data.sigma.g.p != 2) throw GeometryError("reconstruction needs a Riemannian metric");
  if (grid.n < 2 || !(grid.u1 > grid.u0) || !(grid.v1 > grid.v0)) throw GeometryError("empty reconstruction grid");
  if (grid.du() < 1e-10 || grid.dv() < 1e-10) throw GeometryError("step-size underflow");

  Immersion im;
  im.grid = grid;
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) {
      const ClassicalGC r = classical_flat_gc_residual(data, grid.at(i, j));
      im.max_gc_residual = std::max({im.max_gc_residual, r.gauss, r.codazzi});
    }
  if (im.max_gc_residual > kReconstructionGcTol) throw GeometryError("data not flat-compatible");

  // Seed: the upper Cholesky factor R of h, R^T R = h, with n = e_3.
  const std::vector<double> p0 = grid.at(0, 0);
  double h[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) h[a][b] = data.sigma.g.comps[a][b].value(p0);
  State seed;
  const double r00 = std::sqrt(h[0][0]);
  const double r01 = h[0][1] / r00;
  seed.E[0] = {r00, 0.0, 0.0};
  seed.E[1] = {r01, std::sqrt(h[1][1] - r01 * r01), 0.0};
  seed.E[2] = {0.0, 0.0, 1.0};

  const FrameField ff(data);
  const std::vector<State> rows = integrate(ff, grid, seed, 0);
  const std::vector<State> cols = integrate(ff, grid, seed, 1);
  im.F.resize(rows.size());
  im.frame.resize(rows.size());
  for (std::size_t q = 0; q < rows.size(); ++q) {
    im.F[q] = rows[q].F;
    im.frame[q] = rows[q].E;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) {
        im.path_residual = std::max(im.path_residual, std::fabs(rows[q].E[c][r] - cols[q].E[c][r]));
        if (c == 0) im.path_residual = std::max(im.path_residual, std::fabs(rows[q].F[r] - cols[q].F[r]));
      }
    const std::vector<double> p = grid.at(static_cast<int>(q) / grid.n, static_cast<int>(q) % grid.n);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double dot = 0.0;
        for (int r = 0; r < 3; ++r) dot += rows[q].E[a][r] * rows[q].E[b][r];
        im.metric_residual = std::max(im.metric_residual, std::fabs(dot - data.sigma.g.comps[a][b].value(p)));
      }
  }
  return im;
}

double procrustes_rms(const std::vector<std::array<double, 3>>& points,
                      const std::vector<std::array<double, 3>>& reference) {
  if (points.size() != reference.size() || points.empty()) throw std::invalid_argument("point sets differ in size");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd P(n, 3), Q(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) {
      P(i, c) = points[i][c];
      Q(i, c) = reference[i][c];
    }
  const Eigen::RowVector3d pc = P.colwise().mean(), qc = Q.colwise().mean();
  P.rowwise() -= pc;
  Q.rowwise() -= qc;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(P.transpose() * Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Eigen::Matrix3d R = svd.matrixU() * D * svd.matrixV().transpose();  // P R ~ Q
  return std::sqrt((P * R - Q).squaredNorm() / static_cast<double>(n));
}

RealTensor grid_second_fundamental_form(const Immersion& im, int i, int j) {
  const int n = im.grid.n;
  if (i < 2 || j < 2 || i > n - 3 || j > n - 3) throw std::out_of_range("grid node too close to the boundary");
  const double hs[2] = {im.grid.du(), im.grid.dv()};
  auto F = [&](int a, int b, int r) { return im.point(a, b)[r]; };
  const int w1[5] = {1, -8, 0, 8, -1};       // /12h
  const int w2[5] = {-1, 16, -30, 16, -1};  // /12h^2
  Vec3 d[2], dd[2][2];
  for (int r = 0; r < 3; ++r) {
    double su = 0.0, sv = 0.0, suu = 0.0, svv = 0.0, suv = 0.0;
    for (int t = 0; t < 5; ++t) {
      su += w1[t] * F(i + t - 2, j, r);
      sv += w1[t] * F(i, j + t - 2, r);
      suu += w2[t] * F(i + t - 2, j, r);
      svv += w2[t] * F(i, j + t - 2, r);
      for (int q = 0; q < 5; ++q) suv += w1[t] * w1[q] * F(i + t - 2, j + q - 2, r);
    }
    d[0][r] = su / (12 * hs[0]);
    d[1][r] = sv / (12 * hs[1]);
    dd[0][0][r] = suu / (12 * hs[0] * hs[0]);
    dd[1][1][r] = svv / (12 * hs[1] * hs[1]);
    dd[0][1][r] = dd[1][0][r] = suv / (144 * hs[0] * hs[1]);
  }
  Vec3 nrm = {d[0][1] * d[1][2] - d[0][2] * d[1][1], d[0][2] * d[1][0] - d[0][0] * d[1][2],
              d[0][0] * d[1][1] - d[0][1] * d[1][0]};
  const double len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
  RealTensor k({2, 2});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int r = 0; r < 3; ++r) k(a, b) -= nrm[r] / len * dd[a][b][r];
  return k;
}

}  // namespace gcurv
