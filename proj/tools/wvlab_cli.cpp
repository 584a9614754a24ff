#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wvlab/acceptance.hpp"
#include "wvlab/error.hpp"
#include "wvlab/experiments.hpp"

using namespace wvlab;

namespace {

struct Globals {
  double p = 2.0;
  std::uint64_t seed = 20240611;
  double tol = 1e-9;
  std::string out;
  std::int64_t n_max = 50;
  std::string config;
};

DiscreteMeasure single_measure(const std::string& path) {
  std::vector<std::string> warnings;
  auto ms = load_measures(path, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
  if (ms.size() != 1) {
    throw Error(ErrorCode::ParseError,
                path + ": expected one measure, found " + std::to_string(ms.size()));
  }
  return std::move(ms.front());
}

int finish(const Json& j, const std::string& expect) {
  std::cout << j.dump(2) << "\n";
  if (expect.empty()) return EXIT_SUCCESS;
  return j.value("verdict", "") == expect ? EXIT_SUCCESS : EXIT_FAILURE;
}

void add_expect(CLI::App* cmd, std::string& expect) {
  cmd->add_option("--expect", expect, "exit non-zero unless the verdict equals this")
      ->check(CLI::IsMember({"PASS", "FAIL", "INCONCLUSIVE"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Wasserstein distances and checks of the metric eikonal equation."};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--p", g.p, "transport exponent p >= 1")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for every randomized choice")->capture_default_str();
  app.add_option("--tol", g.tol, "agreement tolerance (reproduce) or estimator tolerance (busemann)")
      ->capture_default_str();
  app.add_option("--out", g.out, "output directory for reports (default out/<scenario>)");
  app.add_option("--n-max", g.n_max, "largest sequence index in scenarios")->capture_default_str();
  app.add_option("--config", g.config, "scenario config JSON; flags given explicitly override it");

  std::string mu_path, nu_path, field_path, omega_path, start_path, dict_path, expect;
  std::vector<double> times, radii{1.0, 0.5, 0.1}, levels;
  double eps = 1e-3;
  double t_max = 1e6;
  double step = 1.0;
  std::size_t budget = 8;
  std::size_t steps = 20;

  auto* wp = app.add_subcommand("wp", "exact W_p between two measures, with the optimal plan");
  wp->add_option("--mu", mu_path, "source measure JSON")->required();
  wp->add_option("--nu", nu_path, "target measure JSON")->required();

  auto* geo = app.add_subcommand("geodesic", "displacement interpolation at arc lengths t");
  geo->add_option("--mu", mu_path)->required();
  geo->add_option("--nu", nu_path)->required();
  geo->add_option("-t,--t", times, "arc-length parameters in [0, W_p]")->required();

  auto* bus = app.add_subcommand("busemann", "Busemann function of a lifted field's ray");
  bus->add_option("--field", field_path, "lifted field config JSON")->required();
  bus->add_option("--start", start_path, "measure the ray starts from")->required();
  bus->add_option("--omega", omega_path, "evaluation measure")->required();
  bus->add_option("--t-max", t_max, "truncation horizon")->capture_default_str();

  auto* slope = app.add_subcommand("slope", "certified lower bound on the local or global slope");
  slope->add_option("--field", field_path)->required();
  slope->add_option("--omega", omega_path)->required();
  slope->add_option("--radii", radii, "sphere radii for the local slope")->capture_default_str();
  slope->add_option("--budget", budget, "sphere samples per radius")->capture_default_str();
  slope->add_option("--dictionary", dict_path, "measures for the global slope instead");
  add_expect(slope, expect);

  auto* visc = app.add_subcommand("check-viscosity", "sphere calibration test, optionally dl_G levels");
  visc->add_option("--field", field_path)->required();
  visc->add_option("--omega", omega_path)->required();
  visc->add_option("--radii", radii)->capture_default_str();
  visc->add_option("--eps", eps, "calibration slack")->capture_default_str();
  visc->add_option("--budget", budget)->capture_default_str();
  visc->add_option("--levels", levels, "also run the sublevel witness test at these levels");
  add_expect(visc, expect);

  auto* desc = app.add_subcommand("descend", "greedy epsilon-negative-gradient polyline");
  desc->add_option("--field", field_path)->required();
  desc->add_option("--omega", omega_path)->required();
  desc->add_option("--eps", eps, "total calibration defect")->capture_default_str();
  desc->add_option("--steps", steps)->capture_default_str();
  desc->add_option("--step", step, "step length")->capture_default_str();
  desc->add_option("--budget", budget)->capture_default_str();
  add_expect(desc, expect);

  std::string scenario;
  auto* repro = app.add_subcommand("reproduce", "run a scenario and write report.json and CSV tables");
  repro->add_option("scenario", scenario)->required()->check(CLI::IsMember({"ex3", "ex5", "lift-demo"}));

  auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*wp) {
      return finish(to_json(wasserstein_exact(single_measure(mu_path), single_measure(nu_path), g.p)), "");
    }
    if (*geo) {
      const auto path = displacement_path(single_measure(mu_path), single_measure(nu_path), g.p);
      Json points = Json::array();
      for (double t : times) points.push_back(Json{{"t", t}, {"measure", to_json(path.eval(t))}});
      return finish(Json{{"length", path.length()},
                         {"non_unique", path.non_unique()},
                         {"points", std::move(points)}},
                    "");
    }
    if (*bus) {
      const auto U = field_from_json(read_json_file(field_path), g.p);
      const auto ray = lifted_ray(U, single_measure(start_path));
      const double tol = app.get_option("--tol")->count() > 0 ? g.tol : 1e-6;
      return finish(to_json(busemann_estimate(ray, single_measure(omega_path), tol, t_max)), "");
    }
    Rng rng(g.seed);
    if (*slope) {
      const auto U = field_from_json(read_json_file(field_path), g.p);
      const auto omega = single_measure(omega_path);
      if (!dict_path.empty()) {
        return finish(verdict_json(global_slope_estimate(U, omega, load_measures(dict_path)),
                                   "global-slope", U.analytically_complete()),
                      expect);
      }
      return finish(verdict_json(local_slope_estimate(U, omega, radii, budget, rng), "local-slope", U.analytically_complete()),
                    expect);
    }
    if (*visc) {
      const auto U = field_from_json(read_json_file(field_path), g.p);
      const auto omega = single_measure(omega_path);
      Json j = verdict_json(viscosity_sphere_test(U, omega, radii, eps, budget, rng));
      if (!levels.empty()) {
        Json dlg = verdict_json(dlg_test(U, omega, levels, budget, rng));
        if (dlg["verdict"] != "PASS") j["verdict"] = dlg["verdict"];
        j["dlg"] = std::move(dlg);
      }
      return finish(j, expect);
    }
    if (*desc) {
      const auto U = field_from_json(read_json_file(field_path), g.p);
      DescentOptions opts;
      opts.step = step;
      opts.budget = budget;
      return finish(verdict_json(greedy_descent(U, single_measure(omega_path), eps, steps, rng, opts)),
                    expect);
    }
    if (*repro || *acc) {
      ScenarioConfig cfg;
      if (!g.config.empty()) cfg = config_from_json(read_json_file(g.config));
      cfg.scenario = *repro ? scenario : "acceptance";
      if (app.get_option("--p")->count() > 0) cfg.p = g.p;
      if (app.get_option("--seed")->count() > 0) cfg.seed = g.seed;
      if (app.get_option("--tol")->count() > 0) cfg.tol = g.tol;
      if (app.get_option("--n-max")->count() > 0) cfg.n_max = g.n_max;
      if (!g.out.empty()) {
        cfg.out_dir = g.out;
      } else if (g.config.empty()) {
        cfg.out_dir = std::filesystem::path("out") / cfg.scenario;
      }
      const Report report = run_scenario(cfg);
      emit_report(report, cfg.out_dir);
      for (const auto& c : report.checks) {
        std::cout << (c.met() ? "[ok]       " : "[mismatch] ") << c.name << ": expected "
                  << c.expected << ", observed " << c.observed << "\n";
      }
      if (!report.complete) std::cout << "incomplete: " << report.error << "\n";
      std::cout << "report written to " << cfg.out_dir.string() << "\n";
      return report.expectations_met() ? EXIT_SUCCESS : EXIT_FAILURE;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return EXIT_FAILURE;
}
