#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcurv/jet.hpp"

namespace gcurv {

// Small dense multi-index array. Entries are plain doubles or jets; the
// variance string ('u' upper, 'd' lower, one char per index) is bookkeeping
// for covariant differentiation and is not enforced by arithmetic.
template <class S>
class Tensor {
 public:
  Tensor() = default;

  Tensor(std::vector<int> shape, S fill = S(0.0)) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (int s : shape_) n *= static_cast<std::size_t>(s);
    data_.assign(n, fill);
    variance_.assign(shape_.size(), 'd');
  }

  static Tensor cube(int dim, int rank, S fill = S(0.0)) {
    return Tensor(std::vector<int>(rank, dim), fill);
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  int extent(int k) const { return shape_.at(k); }
  int dim() const { return shape_.empty() ? 0 : shape_[0]; }
  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  const std::string& variance() const { return variance_; }
  Tensor& with_variance(std::string v) {
    if (v.size() != shape_.size()) throw std::invalid_argument("variance length mismatch");
    variance_ = std::move(v);
    return *this;
  }

  S& operator[](std::size_t k) { return data_[k]; }
  const S& operator[](std::size_t k) const { return data_[k]; }

  template <class... I>
  S& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  const S& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  S& at(const std::vector<int>& idx) { return data_[offset_vec(idx)]; }
  const S& at(const std::vector<int>& idx) const { return data_[offset_vec(idx)]; }

  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  // Multi-index of flat position k.
  std::vector<int> unflatten(std::size_t k) const {
    std::vector<int> idx(shape_.size());
    for (int r = rank() - 1; r >= 0; --r) {
      idx[r] = static_cast<int>(k % shape_[r]);
      k /= shape_[r];
    }
    return idx;
  }

  template <class F>
  auto map(F f) const -> Tensor<decltype(f(std::declval<S>()))> {
    using T = decltype(f(std::declval<S>()));
    Tensor<T> out(shape_, T(0.0));
    out.with_variance(variance_);
    for (std::size_t k = 0; k < data_.size(); ++k) out[k] = f(data_[k]);
    return out;
  }

  Tensor& operator+=(const Tensor& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Tensor& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

 private:
  std::vector<int> shape_;
  std::vector<S> data_;
  std::string variance_;

  std::size_t offset(std::initializer_list<int> idx) const {
    if (idx.size() != shape_.size()) throw std::out_of_range("tensor rank mismatch");
    std::size_t k = 0;
    int r = 0;
    for (int i : idx) {
      if (i < 0 || i >= shape_[r]) throw std::out_of_range("tensor index out of range");
      k = k * shape_[r] + i;
      ++r;
    }
    return k;
  }
  std::size_t offset_vec(const std::vector<int>& idx) const {
    if (idx.size() != shape_.size()) throw std::out_of_range("tensor rank mismatch");
    std::size_t k = 0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (idx[r] < 0 || idx[r] >= shape_[r]) throw std::out_of_range("tensor index out of range");
      k = k * shape_[r] + idx[r];
    }
    return k;
  }
  void check_same(const Tensor& o) const {
    if (o.shape_ != shape_) throw std::invalid_argument("tensor shape mismatch");
  }
};

using JetTensor = Tensor<Jet>;
using RealTensor = Tensor<double>;

inline RealTensor values(const JetTensor& t) {
  return t.map([](const Jet& j) { return j.value(); });
}

inline JetTensor partial(const JetTensor& t, int i) {
  return t.map([i](const Jet& j) { return j.partial(i); });
}

inline double max_abs(const RealTensor& t) {
  double m = 0.0;
  for (double x : t.data()) m = std::max(m, std::fabs(x));
  return m;
}

inline double max_abs_diff(const RealTensor& a, const RealTensor& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("tensor shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

}  // namespace gcurv
