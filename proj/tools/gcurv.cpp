#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gcurv/scenarios.hpp"

using namespace gcurv;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

Scenario resolve(const std::string& name) {
  if (name.ends_with(".json")) return load_scenario(name);
  Scenario sc = find_scenario(name);
  validate_scenario(sc);
  return sc;
}

// "u=1,v=0": coordinates of the hypersurface chart when every name belongs
// to it, otherwise of the ambient chart. Missing coordinates are 0.
std::pair<std::vector<double>, bool> parse_point(const std::string& text, const Scenario& sc) {
  std::vector<std::pair<std::string, double>> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ScenarioError("point entries look like name=value: '" + item + "'");
    std::string k = item.substr(0, eq);
    k.erase(0, k.find_first_not_of(' '));
    k.erase(k.find_last_not_of(' ') + 1);
    std::size_t used = 0;
    const std::string v = item.substr(eq + 1);
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ScenarioError("bad number '" + v + "' for " + k);
    }
    kv.emplace_back(k, x);
  }
  auto fill = [&](const Chart& c) -> std::optional<std::vector<double>> {
    std::vector<double> p(c.dim(), 0.0);
    for (const auto& [k, x] : kv) {
      const int i = c.index_of(k);
      if (i < 0) return std::nullopt;
      p[i] = x;
    }
    return p;
  };
  if (sc.embedding) {
    if (auto p = fill(sc.embedding->sigma_chart)) return {*p, true};
  }
  if (auto p = fill(sc.ambient.chart)) return {*p, false};
  throw ScenarioError("point names coordinates outside the scenario charts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gcurv: generalised curvature and hypersurface identity checks"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list builtin scenarios");

  std::string scenario, point_text, suite_text = "all", out_path;
  bool as_json = false;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int grid_n = 33;

  auto* report = app.add_subcommand("report", "evaluate every applicable suite at one point");
  report->add_option("--scenario", scenario, "builtin name or scenario .json file")->required();
  report->add_option("--point", point_text, "coordinates, e.g. \"u=1,v=0\"")->required();
  report->add_flag("--json", as_json, "machine-readable output");

  auto* verify = app.add_subcommand("verify", "run a suite over the scenario's sample points");
  verify->add_option("--suite", suite_text, "identities | flatness | constraints | fundamental | all")
      ->check(CLI::IsMember({"identities", "flatness", "constraints", "fundamental", "all"}));
  verify->add_option("--scenario", scenario, "builtin name or scenario .json file")->required();
  auto* tol_opt = verify->add_option("--tol", tol, "tolerance for every entry");
  auto* seed_opt = verify->add_option("--seed", seed, "re-draw random sample points");
  verify->add_flag("--json", as_json, "machine-readable output");

  auto* recon = app.add_subcommand("reconstruct", "rebuild an immersion in R^3 from (h, k) data");
  recon->add_option("--scenario", scenario, "builtin name or scenario .json file")->required();
  recon->add_option("--grid", grid_n, "points per side")->check(CLI::Range(5, 2049));
  recon->add_option("--out", out_path, "mesh JSON output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& sc : builtin_scenarios()) std::cout << sc.name << "  " << sc.description << "\n";
      std::cout << "families: flat_trivial_<d>, sphere_in_flat_<d>, torus_constant_H_<c>, "
                   "neutral_flat_example_m<m>, random_poly_<seed>_<d>\n";
      return kPass;
    }
    Scenario sc = resolve(scenario);

    if (report->parsed()) {
      auto [p, on_sigma] = parse_point(point_text, sc);
      if (sc.embedding && !on_sigma) sc.embedding.reset();
      sc.points = {p};
      validate_scenario(sc);
      const ResidualReport r = evaluate_point(Suite::All, sc, p);
      std::cout << (as_json ? reports_json(sc.name, "all", {r}) : reports_table({r}));
      return r.pass() ? kPass : kFail;
    }

    if (verify->parsed()) {
      const Suite suite = parse_suite(suite_text);
      if (*seed_opt) {
        if (!sc.random_points) throw ScenarioError("scenario '" + sc.name + "' has fixed sample points");
        sc.resample(seed);
        validate_scenario(sc);
      }
      std::optional<double> t;
      if (*tol_opt) t = tol;
      const auto reports = run_suite(suite, sc, t);
      bool ok = true;
      for (const auto& r : reports) ok = ok && r.pass();
      std::cout << (as_json ? reports_json(sc.name, suite_name(suite), reports) : reports_table(reports));
      return ok ? kPass : kFail;
    }

    if (recon->parsed()) {
      if (!sc.fundamental || !sc.grid) throw ScenarioError("scenario '" + sc.name + "' has no (h, k) data");
      GridSpec g = *sc.grid;
      g.n = grid_n;
      Immersion im;
      try {
        im = reconstruct_immersion(*sc.fundamental, g);
      } catch (const GeometryError& e) {
        std::cerr << "gcurv: " << e.what() << "\n";
        return kFail;
      }
      std::ofstream out(out_path);
      if (!out) throw ScenarioError("cannot write '" + out_path + "'");
      out << mesh_json(im);
      std::cout << "path_residual " << im.path_residual << "\nmetric_residual " << im.metric_residual << "\n";
      return im.path_residual <= 1e-6 && im.metric_residual <= 1e-6 ? kPass : kFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "gcurv: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
