#pragma once

// Finite-difference reference derivatives used as an independent oracle for
// the jet arithmetic. Each level is a Richardson-extrapolated central
// difference, nested for higher orders.

#include <functional>
#include <vector>

namespace fd {

using Fn = std::function<double(const std::vector<double>&)>;

inline double central(const Fn& f, std::vector<double> x, int k, double h) {
  auto diff = [&](double s) {
    std::vector<double> a = x, b = x;
    a[k] += s;
    b[k] -= s;
    return (f(a) - f(b)) / (2.0 * s);
  };
  return (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
}

inline Fn partial(const Fn& f, int k, double h) {
  return [f, k, h](const std::vector<double>& x) { return central(f, x, k, h); };
}

inline double d1(const Fn& f, const std::vector<double>& x, int i, double h = 1e-2) {
  return central(f, x, i, h);
}

inline double d2(const Fn& f, const std::vector<double>& x, int i, int j, double h = 1e-2) {
  return central(partial(f, j, h), x, i, h);
}

inline double d3(const Fn& f, const std::vector<double>& x, int i, int j, int k, double h = 2e-2) {
  return central(partial(partial(f, k, h), j, h), x, i, h);
}

}  // namespace fd
