#include "gcurv/random_fields.hpp"

#include <cstdio>
#include <random>

namespace gcurv {

namespace {

std::string num(double c) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", c);
  std::string s = buf;
  if (c < 0) return "(" + s + ")";
  return s;
}

struct Term {
  double c;
  std::vector<int> pow;
};

struct Poly {
  std::vector<Term> terms;
  // Optional amp * sin(a . x).
  double trig_amp = 0.0;
  std::vector<double> trig_dir;

  std::string str(const std::vector<std::string>& x) const {
    std::string out;
    auto add = [&out](const std::string& t) { out += out.empty() ? t : " + " + t; };
    for (const auto& t : terms) {
      std::string s = num(t.c);
      for (std::size_t i = 0; i < t.pow.size(); ++i) {
        if (t.pow[i] == 1) s += "*" + x[i];
        if (t.pow[i] > 1) s += "*" + x[i] + "^" + std::to_string(t.pow[i]);
      }
      add(s);
    }
    if (trig_amp != 0.0) add(num(trig_amp) + "*sin(" + linear(x) + ")");
    return out.empty() ? "0" : out;
  }

  std::string linear(const std::vector<std::string>& x) const {
    std::string s;
    for (std::size_t i = 0; i < trig_dir.size(); ++i) {
      if (!s.empty()) s += " + ";
      s += num(trig_dir[i]) + "*" + x[i];
    }
    return s;
  }

  std::string derivative_str(int k, const std::vector<std::string>& x) const {
    Poly d;
    for (const auto& t : terms) {
      if (t.pow[k] == 0) continue;
      Term r = t;
      r.c *= t.pow[k];
      r.pow[k] -= 1;
      d.terms.push_back(r);
    }
    std::string s = d.str(x);
    if (trig_amp != 0.0 && trig_dir[k] != 0.0) {
      std::string t = num(trig_amp) + "*" + num(trig_dir[k]) + "*cos(" + linear(x) + ")";
      s = s == "0" ? t : s + " + " + t;
    }
    return s;
  }

  static std::string strip(std::string s) {
    if (!s.empty() && s.front() == '(') s = s.substr(1, s.size() - 2);
    return s;
  }
};

// Round to the printed precision so derivatives built from the rounded
// values stay consistent with the printed polynomial.
double rounded(double c) { return std::stod(Poly::strip(num(c))); }

Poly random_poly(std::mt19937_64& rng, const std::vector<int>& vars, int dim, int nterms, double coef,
                 double trig) {
  std::uniform_real_distribution<double> C(-coef, coef);
  std::uniform_int_distribution<int> deg(1, 3);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()) - 1);
  std::uniform_real_distribution<double> A(-1.0, 1.0);
  Poly p;
  for (int t = 0; t < nterms; ++t) {
    Term term{rounded(C(rng)), std::vector<int>(dim, 0)};
    int n = deg(rng);
    for (int k = 0; k < n; ++k) term.pow[vars[pick(rng)]] += 1;
    p.terms.push_back(term);
  }
  if (trig > 0.0) {
    p.trig_amp = trig;
    p.trig_dir.assign(dim, 0.0);
    for (int v : vars) p.trig_dir[v] = rounded(A(rng));
  }
  return p;
}

std::vector<int> all_vars(int d) {
  std::vector<int> v(d);
  for (int i = 0; i < d; ++i) v[i] = i;
  return v;
}

}  // namespace

std::vector<std::string> default_coords(int d) {
  std::vector<std::string> c;
  for (int i = 1; i <= d; ++i) c.push_back("x" + std::to_string(i));
  return c;
}

AmbientStructure random_poly_structure(const RandomOptions& opt) {
  const int d = opt.dim;
  std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(d));
  AmbientStructure amb;
  amb.chart = Chart("random_" + std::to_string(opt.seed) + "_" + std::to_string(d), default_coords(d));
  const auto& x = amb.chart.coords;
  const auto vars = all_vars(d);

  std::vector<std::vector<std::string>> m(d, std::vector<std::string>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Poly p = random_poly(rng, vars, d, 3, 0.5 * opt.amplitude / 0.1, 0.1);
      std::string base = i == j ? ((opt.lorentzian && i == 0) ? "-1" : "1") : "";
      std::string pert = num(opt.amplitude) + "*(" + p.str(x) + ")";
      m[i][j] = base.empty() ? pert : base + " + " + pert;
      m[j][i] = m[i][j];
    }
  }
  amb.g = MetricField::from_strings(amb.chart, m, opt.lorentzian ? d - 1 : d, opt.lorentzian ? 1 : 0);

  if (opt.with_H) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
          // A component depending only on its own three coordinates is closed.
          Poly p = random_poly(rng, {i, j, k}, d, 3, 1.0, 0.1);
          p.terms.push_back({rounded(std::uniform_real_distribution<double>(-1, 1)(rng)), std::vector<int>(d, 0)});
          amb.H.add(i, j, k, parse(p.str(x), x));
        }
      }
    }
  }

  if (opt.with_dilaton) {
    if (opt.exact_dilaton) {
      Poly phi = random_poly(rng, vars, d, 4, 0.6, 0.1);
      for (int i = 0; i < d; ++i) amb.dilaton.xi.push_back(parse(phi.derivative_str(i, x), x));
    } else {
      for (int i = 0; i < d; ++i) {
        Poly p = random_poly(rng, vars, d, 3, 0.6, 0.1);
        p.terms.push_back({rounded(std::uniform_real_distribution<double>(-0.5, 0.5)(rng)), std::vector<int>(d, 0)});
        amb.dilaton.X.push_back(parse(p.str(x), x));
      }
      for (int i = 0; i < d; ++i) {
        Poly p = random_poly(rng, vars, d, 3, 0.6, 0.1);
        p.terms.push_back({rounded(std::uniform_real_distribution<double>(-0.5, 0.5)(rng)), std::vector<int>(d, 0)});
        amb.dilaton.xi.push_back(parse(p.str(x), x));
      }
    }
  }
  return amb;
}

std::vector<std::string> random_graph_embedding(const RandomOptions& opt, std::vector<std::string>* sigma_coords) {
  const int d = opt.dim;
  std::mt19937_64 rng(opt.seed * 0xD1B54A32D192ED03ULL + 17);
  std::uniform_real_distribution<double> Q(-0.2, 0.2);
  std::vector<std::string> s;
  for (int i = 1; i < d; ++i) s.push_back("s" + std::to_string(i));
  std::vector<std::string> F;
  for (int i = 0; i < d - 1; ++i) F.push_back(s[i]);
  std::string last = num(rounded(Q(rng)));
  for (int i = 0; i < d - 1; ++i) {
    for (int j = i; j < d - 1; ++j) last += " + " + num(rounded(Q(rng))) + "*" + s[i] + "*" + s[j];
  }
  F.push_back(last);
  if (sigma_coords) *sigma_coords = s;
  return F;
}

std::vector<std::vector<double>> random_points(std::uint64_t seed, int n, int count, double radius) {
  std::mt19937_64 rng(seed * 0xBF58476D1CE4E5B9ULL + 3);
  std::uniform_real_distribution<double> U(-radius, radius);
  std::vector<std::vector<double>> pts(count, std::vector<double>(n));
  for (auto& p : pts) {
    for (auto& v : p) v = U(rng);
  }
  return pts;
}

}  // namespace gcurv
