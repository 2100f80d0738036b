#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcurv/expr.hpp"
#include "gcurv/tensor.hpp"

namespace gcurv {

inline constexpr double kDegeneracyTol = 1e-12;
inline constexpr double kSignatureTol = 1e-10;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Chart {
  std::string name;
  std::vector<std::string> coords;
  // Open interval per coordinate; unbounded by default.
  std::vector<std::pair<double, double>> domain;

  Chart() = default;
  Chart(std::string n, std::vector<std::string> c);

  int dim() const { return static_cast<int>(coords.size()); }
  int index_of(const std::string& coord) const;
  void set_domain(const std::string& coord, double lo, double hi);
  bool contains(const std::vector<double>& point) const;
  void validate() const;
};

struct MetricField {
  std::vector<std::vector<Expr>> comps;  // full symmetric matrix
  int p = 0, q = 0;                      // declared signature (p positive)

  static MetricField from_strings(const Chart& chart, const std::vector<std::vector<std::string>>& m, int p,
                                  int q);
};

struct ThreeFormField {
  struct Comp {
    int i, j, k;  // i < j < k
    Expr e;
  };
  std::vector<Comp> comps;

  void add(int i, int j, int k, Expr e);
  bool empty() const { return comps.empty(); }
};

struct DilatonField {
  std::vector<Expr> X;   // vector components, empty = 0
  std::vector<Expr> xi;  // one-form components, empty = 0
};

struct AmbientStructure {
  Chart chart;
  MetricField g;
  ThreeFormField H;
  DilatonField dilaton;

  int dim() const { return chart.dim(); }
};

// Convenience builder from expression strings. H components are given as
// ((i,j,k), expr) with any index order; X and xi may be left empty.
struct HComponent {
  std::array<int, 3> idx;
  std::string expr;
};
AmbientStructure make_ambient(const std::string& name, const std::vector<std::string>& coords,
                              const std::vector<std::vector<std::string>>& metric, int p, int q,
                              const std::vector<HComponent>& H = {}, const std::vector<std::string>& X = {},
                              const std::vector<std::string>& xi = {});

// Raw field jets at a point.
struct FieldJets {
  int dim = 0;
  JetTensor g;   // g_ij
  JetTensor H;   // H_ijk, fully antisymmetric
  JetTensor X;   // X^i
  JetTensor xi;  // xi_i
};

FieldJets evaluate_fields(const AmbientStructure& amb, const std::vector<double>& point, int order = kJetOrder);

// Everything downstream needs at one point, carried as jets. Orders drop by
// one per differentiation: with order-3 field jets, Christoffels are order 2.
struct Geometry {
  int d = 0;
  JetTensor g, ginv;
  JetTensor gamma;  // Gamma^k_ij stored (k, i, j); nabla_i d_j = Gamma^k_ij d_k
  JetTensor H;      // H_ijk
  JetTensor Hup;    // H_ij^k = g^kl H_ijl, stored (i, j, k)
  JetTensor X, xi;
  JetTensor pe_plus, pe_minus;  // pi e_pm = X pm g^-1 xi

  static Geometry from_fields(const FieldJets& f, std::optional<std::pair<int, int>> signature = std::nullopt);
  static Geometry at(const AmbientStructure& amb, const std::vector<double>& point);

  RealTensor g_value() const { return values(g); }
  RealTensor ginv_value() const { return values(ginv); }
};

// Linear algebra helpers.
JetTensor inverse(const JetTensor& a);
double determinant(const RealTensor& a);
std::pair<int, int> signature_of(const RealTensor& a, double tol = kSignatureTol);
void check_metric(const RealTensor& g, std::optional<std::pair<int, int>> signature);

struct MetricAt {
  RealTensor g, g_inv;
  RealTensor dg;   // (k, i, j) = d_k g_ij
  RealTensor d2g;  // (k, l, i, j) = d_k d_l g_ij
};
MetricAt metric_at(const AmbientStructure& amb, const std::vector<double>& point);

struct HContractions {
  double normH2 = 0.0;  // |H|^2 = H_ijk H^ijk
  RealTensor Hsq;       // H^2(X,Y) = tr_g H^(2)(X,.,Y,.)
  RealTensor H2form;    // H^(2)(X,Y,V,W) = g^kl H(X,Y,k) H(V,W,l)
  RealTensor H;         // raw H_ijk
  RealTensor dH;        // (dH)_ijkl
};
HContractions h_contractions(const Geometry& geo);
HContractions h_contractions(const AmbientStructure& amb, const std::vector<double>& point);

// Exterior derivative of a three-form jet tensor: (dH)_ijkl.
RealTensor exterior_derivative3(const JetTensor& H);
double dH_residual(const Geometry& geo);

struct DilatonSplit {
  RealTensor pi_e_plus, pi_e_minus;
  double e_plus_sq = 0.0, e_minus_sq = 0.0;
  double e_pairing = 0.0;  // |e|^2 in the generalised metric
};
DilatonSplit dilaton_split(const Geometry& geo);
DilatonSplit dilaton_split(const AmbientStructure& amb, const std::vector<double>& point);

// Index helpers shared across modules.
RealTensor lower(const RealTensor& v, const RealTensor& g);
double contract2(const RealTensor& a, const RealTensor& b, const RealTensor& ginv);  // a_ij b_kl g^ik g^jl

}  // namespace gcurv
