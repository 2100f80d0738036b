#pragma once

#include <string>
#include <vector>

namespace gcurv {

struct ResidualEntry {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ResidualReport {
  std::string scenario;
  std::vector<double> point;
  std::vector<ResidualEntry> entries;
  double wall_time = 0.0;  // seconds, filled by the suite runner
  std::string error;       // evaluation failure, counts as a fail

  void add(const std::string& name, double residual, double tol) {
    entries.push_back({name, residual, tol, residual <= tol});
  }
  bool pass() const {
    if (!error.empty()) return false;
    for (const auto& e : entries) {
      if (!e.pass) return false;
    }
    return true;
  }
  const ResidualEntry* find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
  double value(const std::string& name) const {
    const ResidualEntry* e = find(name);
    return e ? e->residual : -1.0;
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = e.residual > m ? e.residual : m;
    return m;
  }
};

}  // namespace gcurv
