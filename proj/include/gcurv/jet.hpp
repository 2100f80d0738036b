#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcurv {

inline constexpr int kJetOrder = 3;
inline constexpr int kMaxJetDim = 8;
inline constexpr int kMaxJetCoeffs = 165;  // C(8 + 3, 3)

// Monomial bookkeeping for truncated Taylor polynomials in `dim` variables.
// Monomials of degree <= 3 are ordered by degree, then lexicographically by
// their sorted variable-index lists.
struct JetLayout {
  int dim = 0;
  int count[kJetOrder + 1] = {};  // number of monomials of degree <= k
  std::vector<std::array<std::uint8_t, 3>> vars;  // sorted variable indices
  std::vector<std::uint8_t> degree;
  std::vector<double> alpha_factorial;
  std::vector<int> index1;  // dim
  std::vector<int> index2;  // dim*dim (symmetric fill)
  std::vector<int> index3;  // dim^3 (symmetric fill)

  struct MulEntry {
    std::uint8_t a, b, out;
  };
  std::vector<MulEntry> mul;  // sorted by degree(out)
  int mul_end[kJetOrder + 1] = {};

  struct PartialEntry {
    std::uint8_t dst, src;
    double factor;
  };
  std::vector<std::vector<PartialEntry>> partial;  // per variable

  int monomial(std::initializer_list<int> idx) const;
};

const JetLayout& jet_layout(int dim);

// Order-3 truncated Taylor jet of a scalar at a base point. The coefficient
// array holds Taylor coefficients (f = sum c_a * dx^a), not raw derivatives.
// `order` records how many derivative levels are trustworthy; it shrinks when
// a jet is differentiated and propagates as a minimum through arithmetic.
// A jet of dim 0 is a constant and mixes with jets of any dimension.
class Jet {
 public:
  Jet() { c_.fill(0.0); }
  Jet(double c) {  // NOLINT(google-explicit-constructor)
    c_.fill(0.0);
    c_[0] = c;
  }

  static Jet variable(int dim, int index, double value);
  static Jet zero(int dim, int order = kJetOrder);

  int dim() const { return dim_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }
  bool is_constant() const;

  double d(int i) const;
  double d(int i, int j) const;
  double d(int i, int j, int k) const;
  std::vector<double> grad() const;

  Jet partial(int i) const;
  Jet truncated(int order) const;

  double coeff(int m) const { return c_[m]; }
  double& coeff(int m) { return c_[m]; }
  int size() const { return dim_ == 0 ? 1 : jet_layout(dim_).count[kJetOrder]; }

  // f(this) given f and its first three derivatives at value().
  Jet apply(double f0, double f1, double f2, double f3) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator+(double s, Jet a) { return a += Jet(s); }
  friend Jet operator+(Jet a, double s) { return a += Jet(s); }
  friend Jet operator-(double s, const Jet& a) { return Jet(s) - a; }
  friend Jet operator-(Jet a, double s) { return a -= Jet(s); }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(double s, const Jet& a) { return Jet(s) / a; }

 private:
  int dim_ = 0;
  int order_ = kJetOrder;
  std::array<double, kMaxJetCoeffs> c_;

  void adopt_dim(const Jet& o);
};

Jet reciprocal(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet abs(const Jet& a);
Jet pow_int(const Jet& a, long n);
Jet pow(const Jet& a, const Jet& b);

// Taylor composition outer(inner_1, ..., inner_m). The outer jet lives in m
// variables at the point given by the inner values; the result lives in the
// variables of the inner jets. Monomials of the inner displacements are
// cached so that many outer jets can be pushed through one map cheaply.
class JetComposer {
 public:
  explicit JetComposer(const std::vector<Jet>& inner);
  Jet operator()(const Jet& outer) const;
  int outer_dim() const { return m_; }
  int inner_dim() const { return n_; }

 private:
  int m_ = 0;
  int n_ = 0;
  int order_ = kJetOrder;
  std::vector<Jet> mono_;
};

Jet compose_jets(const Jet& outer, const std::vector<Jet>& inner);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace gcurv
