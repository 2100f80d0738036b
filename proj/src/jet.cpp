#include "gcurv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace gcurv {

namespace {

std::unique_ptr<JetLayout> build_layout(int dim) {
  auto L = std::make_unique<JetLayout>();
  L->dim = dim;
  const int n = dim;
  L->index1.assign(n, -1);
  L->index2.assign(n * n, -1);
  L->index3.assign(n * n * n, -1);

  auto push = [&](std::array<std::uint8_t, 3> v, int deg) {
    L->vars.push_back(v);
    L->degree.push_back(static_cast<std::uint8_t>(deg));
    double fac = 1.0;
    if (deg == 2 && v[0] == v[1]) fac = 2.0;
    if (deg == 3) {
      if (v[0] == v[1] && v[1] == v[2]) {
        fac = 6.0;
      } else if (v[0] == v[1] || v[1] == v[2]) {
        fac = 2.0;
      }
    }
    L->alpha_factorial.push_back(fac);
    return static_cast<int>(L->vars.size()) - 1;
  };

  push({0, 0, 0}, 0);
  L->count[0] = 1;
  for (int i = 0; i < n; ++i) L->index1[i] = push({std::uint8_t(i), 0, 0}, 1);
  L->count[1] = static_cast<int>(L->vars.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      int m = push({std::uint8_t(i), std::uint8_t(j), 0}, 2);
      L->index2[i * n + j] = m;
      L->index2[j * n + i] = m;
    }
  }
  L->count[2] = static_cast<int>(L->vars.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        int m = push({std::uint8_t(i), std::uint8_t(j), std::uint8_t(k)}, 3);
        int p[3] = {i, j, k};
        std::sort(p, p + 3);
        do {
          L->index3[(p[0] * n + p[1]) * n + p[2]] = m;
        } while (std::next_permutation(p, p + 3));
      }
    }
  }
  L->count[3] = static_cast<int>(L->vars.size());
  if (L->count[3] > kMaxJetCoeffs) throw std::logic_error("jet layout overflow");

  // Multiset union of two monomials.
  auto merge = [&](int a, int b) {
    int da = L->degree[a], db = L->degree[b];
    std::vector<int> v;
    for (int t = 0; t < da; ++t) v.push_back(L->vars[a][t]);
    for (int t = 0; t < db; ++t) v.push_back(L->vars[b][t]);
    std::sort(v.begin(), v.end());
    switch (v.size()) {
      case 0: return 0;
      case 1: return L->index1[v[0]];
      case 2: return L->index2[v[0] * n + v[1]];
      default: return L->index3[(v[0] * n + v[1]) * n + v[2]];
    }
  };

  const int total = L->count[3];
  for (int deg = 0; deg <= kJetOrder; ++deg) {
    for (int a = 0; a < total; ++a) {
      for (int b = 0; b < total; ++b) {
        if (L->degree[a] + L->degree[b] != deg) continue;
        L->mul.push_back({std::uint8_t(a), std::uint8_t(b), std::uint8_t(merge(a, b))});
      }
    }
    L->mul_end[deg] = static_cast<int>(L->mul.size());
  }

  L->partial.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < L->count[2]; ++m) {
      int src = merge(m, L->index1[i]);
      int mult = 1;
      for (int t = 0; t < L->degree[m]; ++t) mult += (L->vars[m][t] == i);
      L->partial[i].push_back({std::uint8_t(m), std::uint8_t(src), double(mult)});
    }
  }
  return L;
}

}  // namespace

int JetLayout::monomial(std::initializer_list<int> idx) const {
  std::vector<int> v(idx);
  for (int i : v) {
    if (i < 0 || i >= dim) throw std::out_of_range("jet variable index out of range");
  }
  switch (v.size()) {
    case 0: return 0;
    case 1: return index1[v[0]];
    case 2: return index2[v[0] * dim + v[1]];
    case 3: return index3[(v[0] * dim + v[1]) * dim + v[2]];
    default: throw std::out_of_range("jet monomial degree exceeds 3");
  }
}

const JetLayout& jet_layout(int dim) {
  static std::unique_ptr<JetLayout> cache[kMaxJetDim + 1];
  static std::once_flag flags[kMaxJetDim + 1];
  if (dim < 1 || dim > kMaxJetDim) {
    throw std::invalid_argument("jet dimension " + std::to_string(dim) + " outside [1, " +
                                std::to_string(kMaxJetDim) + "]");
  }
  std::call_once(flags[dim], [dim] { cache[dim] = build_layout(dim); });
  return *cache[dim];
}

Jet Jet::variable(int dim, int index, double value) {
  const JetLayout& L = jet_layout(dim);
  Jet j;
  j.dim_ = dim;
  j.c_[0] = value;
  j.c_[L.index1.at(index)] = 1.0;
  return j;
}

Jet Jet::zero(int dim, int order) {
  Jet j;
  if (dim > 0) jet_layout(dim);
  j.dim_ = dim;
  j.order_ = order;
  return j;
}

bool Jet::is_constant() const {
  for (int m = 1; m < size(); ++m) {
    if (c_[m] != 0.0) return false;
  }
  return true;
}

double Jet::d(int i) const {
  if (dim_ == 0) return 0.0;
  if (order_ < 1) throw std::logic_error("first derivative requested from order-0 jet");
  return c_[jet_layout(dim_).index1.at(i)];
}

double Jet::d(int i, int j) const {
  if (dim_ == 0) return 0.0;
  if (order_ < 2) throw std::logic_error("second derivative requested from jet of order < 2");
  const JetLayout& L = jet_layout(dim_);
  int m = L.monomial({i, j});
  return c_[m] * L.alpha_factorial[m];
}

double Jet::d(int i, int j, int k) const {
  if (dim_ == 0) return 0.0;
  if (order_ < 3) throw std::logic_error("third derivative requested from jet of order < 3");
  const JetLayout& L = jet_layout(dim_);
  int m = L.monomial({i, j, k});
  return c_[m] * L.alpha_factorial[m];
}

std::vector<double> Jet::grad() const {
  std::vector<double> g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = d(i);
  return g;
}

Jet Jet::partial(int i) const {
  if (dim_ == 0) return Jet(0.0);
  if (order_ < 1) throw std::logic_error("cannot differentiate an order-0 jet");
  const JetLayout& L = jet_layout(dim_);
  Jet r = Jet::zero(dim_, order_ - 1);
  const int lim = L.count[order_ - 1];
  for (const auto& e : L.partial.at(i)) {
    if (e.dst < lim) r.c_[e.dst] = e.factor * c_[e.src];
  }
  return r;
}

Jet Jet::truncated(int order) const {
  Jet r = *this;
  if (order >= order_ || dim_ == 0) return r;
  const JetLayout& L = jet_layout(dim_);
  for (int m = L.count[order]; m < L.count[kJetOrder]; ++m) r.c_[m] = 0.0;
  r.order_ = order;
  return r;
}

void Jet::adopt_dim(const Jet& o) {
  if (o.dim_ == dim_ || o.dim_ == 0) return;
  if (dim_ == 0) {
    dim_ = o.dim_;
    return;
  }
  throw std::invalid_argument("jet dimension mismatch: " + std::to_string(dim_) + " vs " +
                              std::to_string(o.dim_));
}

Jet Jet::operator-() const {
  Jet r = *this;
  const int n = size();
  for (int m = 0; m < n; ++m) r.c_[m] = -r.c_[m];
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  adopt_dim(o);
  const int n = o.size();
  for (int m = 0; m < n; ++m) c_[m] += o.c_[m];
  order_ = std::min(order_, o.order_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  adopt_dim(o);
  const int n = o.size();
  for (int m = 0; m < n; ++m) c_[m] -= o.c_[m];
  order_ = std::min(order_, o.order_);
  return *this;
}

Jet& Jet::operator*=(double s) {
  const int n = size();
  for (int m = 0; m < n; ++m) c_[m] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.dim_ == 0) return b * a.c_[0];
  if (b.dim_ == 0) return a * b.c_[0];
  if (a.dim_ != b.dim_) {
    throw std::invalid_argument("jet dimension mismatch: " + std::to_string(a.dim_) + " vs " +
                                std::to_string(b.dim_));
  }
  const JetLayout& L = jet_layout(a.dim_);
  Jet r = Jet::zero(a.dim_, std::min(a.order_, b.order_));
  const int end = L.mul_end[r.order_];
  for (int t = 0; t < end; ++t) {
    const auto& e = L.mul[t];
    r.c_[e.out] += a.c_[e.a] * b.c_[e.b];
  }
  return r;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet Jet::apply(double f0, double f1, double f2, double f3) const {
  if (dim_ == 0) return Jet(f0);
  Jet delta = *this;
  delta.c_[0] = 0.0;
  Jet r = delta * f1;
  if (order_ >= 2) {
    Jet d2 = delta * delta;
    r += d2 * (0.5 * f2);
    if (order_ >= 3) r += (d2 * delta) * (f3 / 6.0);
  }
  r.c_[0] = f0;
  return r;
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw std::domain_error("division by zero");
  const double r = 1.0 / x;
  return a.apply(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.dim() == 0) {
    if (b.value() == 0.0) throw std::domain_error("division by zero");
    return a * (1.0 / b.value());
  }
  return a * reciprocal(b);
}

Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet sin(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  return a.apply(s, c, -s, -c);
}

Jet cos(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  return a.apply(c, -s, -c, s);
}

Jet tan(const Jet& a) {
  double t = std::tan(a.value());
  double s2 = 1.0 + t * t;  // sec^2
  return a.apply(t, s2, 2.0 * t * s2, 2.0 * s2 * (s2 + 2.0 * t * t));
}

Jet sinh(const Jet& a) {
  double s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.apply(s, c, s, c);
}

Jet cosh(const Jet& a) {
  double s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.apply(c, s, c, s);
}

Jet tanh(const Jet& a) {
  double t = std::tanh(a.value());
  double s = 1.0 - t * t;
  return a.apply(t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0));
}

Jet exp(const Jet& a) {
  double e = std::exp(a.value());
  return a.apply(e, e, e, e);
}

Jet log(const Jet& a) {
  double x = a.value();
  if (!(x > 0.0)) throw std::domain_error("log of non-positive value");
  double r = 1.0 / x;
  return a.apply(std::log(x), r, -r * r, 2.0 * r * r * r);
}

Jet sqrt(const Jet& a) {
  double x = a.value();
  if (!(x > 0.0)) throw std::domain_error("sqrt of non-positive value");
  double s = std::sqrt(x);
  return a.apply(s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x));
}

Jet abs(const Jet& a) {
  double x = a.value();
  if (x == 0.0 && !a.is_constant()) throw std::domain_error("abs is not differentiable at 0");
  return x < 0.0 ? -a : a;
}

Jet pow_int(const Jet& a, long n) {
  if (n < 0) return reciprocal(pow_int(a, -n));
  Jet result(1.0);
  Jet base = a;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) {
    double p = b.value();
    if (std::nearbyint(p) == p && std::fabs(p) < 1e9) return pow_int(a, static_cast<long>(p));
    double x = a.value();
    if (!(x > 0.0)) throw std::domain_error("real exponent requires a positive base");
    double f0 = std::pow(x, p);
    return a.apply(f0, p * f0 / x, p * (p - 1) * f0 / (x * x), p * (p - 1) * (p - 2) * f0 / (x * x * x));
  }
  if (!(a.value() > 0.0)) throw std::domain_error("real exponent requires a positive base");
  return exp(b * log(a));
}

JetComposer::JetComposer(const std::vector<Jet>& inner) : m_(static_cast<int>(inner.size())) {
  if (m_ == 0) throw std::invalid_argument("composition needs at least one inner jet");
  for (const Jet& j : inner) {
    if (j.dim() == 0) continue;
    if (n_ == 0) n_ = j.dim();
    if (j.dim() != n_) throw std::invalid_argument("inner jets of composition differ in dimension");
    order_ = std::min(order_, j.order());
  }
  if (n_ == 0) throw std::invalid_argument("composition needs a non-constant inner jet");
  const JetLayout& L = jet_layout(m_);
  std::vector<Jet> delta(m_);
  for (int i = 0; i < m_; ++i) {
    delta[i] = inner[i] - inner[i].value();
    if (delta[i].dim() == 0) delta[i] = Jet::zero(n_);
  }
  mono_.resize(L.count[kJetOrder]);
  mono_[0] = Jet(1.0);
  for (int m = 1; m < L.count[kJetOrder]; ++m) {
    const auto& v = L.vars[m];
    const int deg = L.degree[m];
    if (deg == 1) {
      mono_[m] = delta[v[0]];
    } else if (deg == 2) {
      mono_[m] = delta[v[0]] * delta[v[1]];
    } else {
      mono_[m] = mono_[L.index2[v[0] * m_ + v[1]]] * delta[v[2]];
    }
  }
}

Jet JetComposer::operator()(const Jet& outer) const {
  if (outer.dim() == 0) return Jet(outer.value());
  if (outer.dim() != m_) throw std::invalid_argument("outer jet dimension does not match inner count");
  const JetLayout& L = jet_layout(m_);
  const int ord = std::min(order_, outer.order());
  Jet r = Jet::zero(n_, ord);
  r.coeff(0) = outer.value();
  for (int m = 1; m < L.count[ord]; ++m) {
    double c = outer.coeff(m);
    if (c != 0.0) r += mono_[m].truncated(ord) * c;
  }
  return r;
}

Jet compose_jets(const Jet& outer, const std::vector<Jet>& inner) {
  return JetComposer(inner)(outer);
}

}  // namespace gcurv
