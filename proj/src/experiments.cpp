#include "wvlab/experiments.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include "wvlab/acceptance.hpp"
#include "wvlab/error.hpp"

namespace wvlab {

namespace {

DiscreteMeasure on_line(std::vector<double> xs, std::vector<double> ws) {
  std::vector<BasePoint> pts;
  for (double x : xs) pts.push_back(BasePoint{x});
  return validate_measure(std::move(pts), std::move(ws));
}

DiscreteMeasure escaping_mixture(std::int64_t n, double p) {
  const double tail = 1.0 / std::pow(double(n), p);
  return on_line({0.0, double(n) * double(n)}, {1.0 - tail, tail});
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Least-squares slope and intercept of log|y| against log x.
std::pair<double, double> loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(std::abs(ys[i]) > 0.0)) continue;
    const double lx = std::log(xs[i]);
    const double ly = std::log(std::abs(ys[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw Error(ErrorCode::DomainError, "decay fit needs two non-zero values");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / double(n)};
}

void check_range(const ScenarioConfig& cfg) {
  if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) {
    throw Error(ErrorCode::DomainError,
                fmt::format("bad n range [{}, {}]", cfg.n_min, cfg.n_max));
  }
}

void run_ex3(const ScenarioConfig& cfg, Report& rep) {
  check_range(cfg);
  const std::vector<DiscreteMeasure> corpus = {
      on_line({1.0}, {1.0}),
      on_line({1.0, -2.0}, {0.5, 0.5}),
      on_line({-1.0, 2.0}, {0.25, 0.75}),
  };
  Table values{"ex3_values", {"n", "u_n(delta_1)", "closed_form", "u_n(mix_a)", "u_n(mix_b)"}, {}};
  std::vector<double> ns;
  std::vector<std::vector<double>> per_measure(corpus.size());
  double closed_err = 0.0;
  for (std::int64_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    const auto u = distance_field(escaping_mixture(n, 2.0), double(n), 2.0);
    const double nn = double(n);
    const double closed = std::sqrt(nn * nn - 1.0) - nn;
    std::vector<double> row{nn};
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const double v = eval_field(u, corpus[k]);
      row.push_back(v);
      if (k == 0) {
        row.push_back(closed);
        closed_err = std::max(closed_err, std::abs(v - closed));
      }
      if (n >= 2) per_measure[k].push_back(v);
    }
    if (n >= 2) ns.push_back(nn);
    values.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(values));
  rep.checks.push_back({"closed form at delta_1", "PASS", pass_fail(closed_err <= cfg.tol),
                        Json{{"max_error", closed_err}, {"tol", cfg.tol}}});

  Table fit{"ex3_decay_fit", {"corpus_index", "slope", "intercept"}, {}};
  bool decays = true;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto [slope, intercept] = loglog_fit(ns, per_measure[k]);
    fit.rows.push_back({double(k), slope, intercept});
    decays = decays && std::abs(slope + 1.0) <= 0.1;
  }
  rep.tables.push_back(std::move(fit));
  rep.checks.push_back({"values decay like 1/n", "PASS", pass_fail(decays), Json::object()});

  Rng rng(cfg.seed);
  const auto limit = constant_field(0.0, 2.0);
  const auto sphere = viscosity_sphere_test(limit, corpus[0], {1.0, 0.5, 0.1}, cfg.eps, cfg.budget, rng);
  rep.checks.push_back(
      {"limit field sphere test", "FAIL", to_string(sphere.verdict), verdict_json(sphere)});
  const auto slope = local_slope_estimate(limit, corpus[0], {1.0, 0.5, 0.1}, cfg.budget, rng);
  rep.checks.push_back({"limit field local slope is 0", "PASS", pass_fail(slope.value == 0.0),
                        verdict_json(slope, "local-slope", limit.analytically_complete())});
}

void run_ex5(const ScenarioConfig& cfg, Report& rep) {
  check_range(cfg);
  const auto origin = on_line({0.0}, {1.0});
  Table distances{"ex5_distances", {"n", "W_p", "abs_error"}, {}};
  double worst = 0.0;
  for (std::int64_t n = cfg.n_min; n <= cfg.n_max; ++n) {
    const double w = wasserstein(escaping_mixture(n, cfg.p), origin, cfg.p);
    worst = std::max(worst, std::abs(w - double(n)));
    distances.rows.push_back({double(n), w, std::abs(w - double(n))});
  }
  rep.tables.push_back(std::move(distances));
  rep.checks.push_back({"W_p(omega_n, delta_0) = n", "PASS", pass_fail(worst <= cfg.tol),
                        Json{{"max_error", worst}, {"tol", cfg.tol}}});

  CsParams params;
  params.sigma = 1.0;
  params.first_index = std::max<std::int64_t>(cfg.n_min, 2);
  params.count = std::size_t(cfg.n_max - params.first_index + 1);
  params.cluster = 5;
  params.p = cfg.p;
  const auto seq = [p = cfg.p](std::int64_t n) { return escaping_mixture(n, p); };
  // first pass only measures the sphere distances
  params.eps = 0.0;
  const double observed = cs_diagnostic(seq, origin, params).min_offdiagonal;
  params.eps = observed / 2.0;
  const auto cs = cs_diagnostic(seq, origin, params);

  Table matrix{"ex5_sphere_matrix", {"n"}, {}};
  for (auto n : cs.indices) matrix.columns.push_back(fmt::format("n={}", n));
  for (std::size_t i = 0; i < cs.indices.size(); ++i) {
    std::vector<double> row{double(cs.indices[i])};
    row.insert(row.end(), cs.matrix[i].begin(), cs.matrix[i].end());
    matrix.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(matrix));
  Json detail = to_json(cs);
  detail.erase("matrix");
  rep.checks.push_back({"sphere points cluster", "FAIL", to_string(cs.verdict), std::move(detail)});
}

void run_lift_demo(const ScenarioConfig& cfg, Report& rep) {
  Rng rng(cfg.seed);
  const auto base = min_combine({BaseScalarField::busemann(UnitVector{1, 0}),
                                 BaseScalarField::busemann(UnitVector{-0.6, 0.8}, 0.5),
                                 BaseScalarField::busemann(UnitVector{0, -1}, -0.25)});
  const auto U = lift(base, cfg.p);
  const auto omega = random_measure(2, 4, 2.0, rng);

  std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
  for (int k = 0; k < 100; ++k) {
    pairs.emplace_back(random_measure(2, 1 + k % 6, 3.0, rng), random_measure(2, 1 + k % 5, 3.0, rng));
  }
  const auto probe = lipschitz_probe(U, pairs);
  rep.checks.push_back({"1-Lipschitz probe", "PASS", pass_fail(probe.max_ratio <= 1.0 + 1e-9),
                        Json{{"max_ratio", probe.max_ratio}, {"pairs", probe.used_pairs}}});

  const auto sphere = viscosity_sphere_test(U, omega, {1.0, 0.5, 0.1}, cfg.eps, cfg.budget, rng);
  rep.checks.push_back({"sphere test", "PASS", to_string(sphere.verdict), verdict_json(sphere)});

  const auto ray = lifted_ray(U, omega);
  Table calibration{"lift_calibration", {"t", "U_drop", "W_span"}, {}};
  bool calibrated = true;
  const auto start = ray.eval(0.0);
  const double u_start = eval_field(U, start);
  for (double t : {0.0, 1.0, 5.0, 10.0}) {
    const auto x = ray.eval(t);
    const double drop = u_start - eval_field(U, x);
    const double span = wasserstein(start, x, cfg.p);
    calibrated = calibrated && std::abs(drop - t) <= 1e-10 && std::abs(span - t) <= 1e-8;
    calibration.rows.push_back({t, drop, span});
  }
  rep.tables.push_back(std::move(calibration));
  rep.checks.push_back({"lifted ray calibration", "PASS", pass_fail(calibrated), Json::object()});

  const auto line = greedy_descent(U, omega, 1e-2, 20, rng);
  Table descent{"lift_descent", {"step", "time", "value", "distance_from_start"}, {}};
  for (std::size_t k = 0; k < line.vertices.size(); ++k) {
    descent.rows.push_back({double(k), line.times[k], line.values[k], line.distance_from_start[k]});
  }
  rep.tables.push_back(std::move(descent));
  rep.checks.push_back({"epsilon descent", "PASS",
                        pass_fail(!line.stall && line.max_slack() <= line.epsilon),
                        verdict_json(line)});

  const double u0 = eval_field(U, omega);
  const auto dlg = dlg_test(U, omega, {u0 - 1.0, u0 - 10.0}, cfg.budget, rng);
  rep.checks.push_back({"sublevel distances", "PASS", to_string(dlg.verdict), verdict_json(dlg)});

  std::vector<WassersteinRay> rays;
  for (int k = 0; k < 5; ++k) rays.push_back(lifted_ray(U, random_measure(2, 1 + k % 3, 3.0, rng)));
  const auto repr = representation_check(U, omega, rays);
  rep.checks.push_back({"ray representation", "PASS", to_string(repr.verdict), verdict_json(repr)});
}

void run_acceptance_scenario(const ScenarioConfig& cfg, Report& rep) {
  Table table{"acceptance", {"criterion", "passed"}, {}};
  for (const auto& r : run_acceptance(cfg.seed)) {
    table.rows.push_back({double(r.id), r.passed ? 1.0 : 0.0});
    rep.checks.push_back({fmt::format("{:02d} {}", r.id, r.title), "PASS", pass_fail(r.passed),
                          Json{{"detail", r.detail}}});
  }
  rep.tables.push_back(std::move(table));
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace

ScenarioConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config: expected an object");
  ScenarioConfig cfg;
  try {
    cfg.scenario = j.value("scenario", cfg.scenario);
    cfg.p = j.value("p", cfg.p);
    cfg.n_min = j.value("n_min", cfg.n_min);
    cfg.n_max = j.value("n_max", cfg.n_max);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.budget = j.value("budget", cfg.budget);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir.string());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  if (cfg.scenario != "ex3" && cfg.scenario != "ex5" && cfg.scenario != "lift-demo" &&
      cfg.scenario != "acceptance") {
    throw Error(ErrorCode::ParseError, "config: unknown scenario \"" + cfg.scenario + "\"");
  }
  return cfg;
}

Json to_json(const ScenarioConfig& cfg) {
  return Json{{"scenario", cfg.scenario}, {"p", cfg.p},     {"n_min", cfg.n_min},
              {"n_max", cfg.n_max},       {"tol", cfg.tol}, {"eps", cfg.eps},
              {"budget", cfg.budget},     {"seed", cfg.seed}, {"out_dir", cfg.out_dir.string()}};
}

bool Report::expectations_met() const {
  if (!complete) return false;
  for (const auto& c : checks) {
    if (!c.met()) return false;
  }
  return true;
}

Report run_scenario(const ScenarioConfig& cfg) {
  Report rep;
  rep.scenario = cfg.scenario;
  rep.config = cfg;
  rep.environment = Json{{"version", kVersion},
                         {"seed", cfg.seed},
                         {"tol", cfg.tol},
                         {"eps", cfg.eps},
                         {"timestamp", utc_timestamp()}};
  try {
    if (cfg.scenario == "ex3") {
      run_ex3(cfg, rep);
    } else if (cfg.scenario == "ex5") {
      run_ex5(cfg, rep);
    } else if (cfg.scenario == "lift-demo") {
      run_lift_demo(cfg, rep);
    } else if (cfg.scenario == "acceptance") {
      run_acceptance_scenario(cfg, rep);
    } else {
      throw Error(ErrorCode::DomainError, "unknown scenario \"" + cfg.scenario + "\"");
    }
  } catch (const Error& e) {
    rep.complete = false;
    rep.error = e.what();
  }
  return rep;
}

Json to_json(const Report& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"expected", c.expected},
                          {"observed", c.observed},
                          {"met", c.met()},
                          {"detail", c.detail}});
  }
  Json tables = Json::array();
  for (const auto& t : report.tables) tables.push_back(t.name + ".csv");
  return Json{{"scenario", report.scenario},
              {"config", to_json(report.config)},
              {"environment", report.environment},
              {"complete", report.complete},
              {"error", report.error.empty() ? Json(nullptr) : Json(report.error)},
              {"expectations_met", report.expectations_met()},
              {"checks", std::move(checks)},
              {"tables", std::move(tables)}};
}

std::string to_csv(const Table& table) {
  std::string out = fmt::format("{}\n", fmt::join(table.columns, ","));
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_cell(v));
    out += fmt::format("{}\n", fmt::join(cells, ","));
  }
  return out;
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", to_json(report).dump(2) + "\n");
  for (const auto& t : report.tables) write_file(dir / (t.name + ".csv"), to_csv(t));
}

}  // namespace wvlab
