#include "wvlab/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "overloaded.hpp"
#include "wvlab/error.hpp"
#include "wvlab/ot_exact.hpp"

namespace wvlab {

namespace {

using detail::Overloaded;

constexpr double kDegenerateDistance = 1e-10;
constexpr double kLevelSlack = 1e-9;
constexpr double kCalibrationProbeTol = 1e-6;
constexpr double kRepresentationTol = 1e-6;

std::vector<double> cache_key(const DiscreteMeasure& m) {
  std::vector<double> key;
  key.reserve(m.size() * (m.dim() + 1));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double c : m.atom(i).coords()) key.push_back(c);
    key.push_back(m.weight(i));
  }
  return key;
}

std::size_t field_dim(const MeasureField& U) {
  return std::visit(Overloaded{
                        [](const LiftedField& f) { return f.base.dim(); },
                        [](const DistanceField& f) { return f.target.dim(); },
                        [](const BusemannRayField& f) { return f.ray->base().dim(); },
                        [](const DlcLimitField& f) { return f.dim; },
                        [](const InfField& f) {
                          std::size_t d = 0;
                          for (const auto& m : f.members) d = std::max(d, field_dim(m));
                          return d;
                        },
                        [](const ConstantField& f) { return f.dim; },
                    },
                    U.node());
}

// Point at arc length t on the lifted ray from omega, without the solver
// certificate that WassersteinRay performs.
DiscreteMeasure lifted_ray_point(const BaseScalarField& u, const DiscreteMeasure& omega, double t) {
  std::vector<BasePoint> support;
  support.reserve(omega.size());
  for (const auto& x : omega.support()) {
    support.push_back(ray_eval(base_negative_gradient_ray(u, x), t));
  }
  return validate_measure(std::move(support), omega.weights());
}

// Measure at distance r from omega along which U is known to decrease at unit
// rate, when such a curve is available in closed form.
std::optional<DiscreteMeasure> analytic_candidate(const MeasureField& U,
                                                  const DiscreteMeasure& omega, double r) {
  return std::visit(
      Overloaded{
          [&](const LiftedField& f) -> std::optional<DiscreteMeasure> {
            if (!f.base.has_analytic_ray()) return std::nullopt;
            return lifted_ray_point(f.base, omega, r);
          },
          [&](const DistanceField& f) -> std::optional<DiscreteMeasure> {
            const WassersteinPath path = displacement_path(omega, f.target, U.p());
            if (path.degenerate() || r > path.length()) return std::nullopt;
            return path.eval(r);
          },
          [&](const InfField& f) -> std::optional<DiscreteMeasure> {
            std::size_t arg = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < f.members.size(); ++k) {
              const double v = eval_field(f.members[k], omega);
              if (v < best) {
                best = v;
                arg = k;
              }
            }
            return analytic_candidate(f.members[arg], omega, r);
          },
          [](const auto&) -> std::optional<DiscreteMeasure> { return std::nullopt; },
      },
      U.node());
}

Witness make_witness(const MeasureField& U, const DiscreteMeasure& omega, double u_omega,
                     DiscreteMeasure x, std::string source) {
  const double d = wasserstein(omega, x, U.p());
  const double ux = eval_field(U, x);
  return Witness{std::move(x), d, u_omega, ux, std::move(source)};
}

std::vector<SphereSample> try_sphere(const DiscreteMeasure& omega, double r, double p,
                                     std::size_t budget, Rng& rng) {
  try {
    return sphere_sample(omega, r, p, budget, rng);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SphereSamplingFailed) throw;
    return {};
  }
}

}  // namespace

MeasureField::MeasureField(Node node, double p) : node_(std::move(node)), p_(p) {
  if (!(p_ >= 1.0) || !std::isfinite(p_)) throw Error(ErrorCode::DomainError, "p must be >= 1");
}

std::string MeasureField::kind() const {
  return std::visit(Overloaded{
                        [](const LiftedField&) { return std::string("lifted"); },
                        [](const DistanceField&) { return std::string("distance"); },
                        [](const BusemannRayField&) { return std::string("busemann"); },
                        [](const DlcLimitField&) { return std::string("dlc-limit"); },
                        [](const InfField&) { return std::string("inf"); },
                        [](const ConstantField&) { return std::string("constant"); },
                    },
                    node_);
}

bool MeasureField::analytically_complete() const {
  return std::visit(Overloaded{
                        [](const LiftedField& f) { return f.base.has_analytic_ray(); },
                        [](const ConstantField&) { return true; },
                        [](const InfField& f) {
                          return std::all_of(f.members.begin(), f.members.end(),
                                             [](const MeasureField& m) {
                                               return m.analytically_complete();
                                             });
                        },
                        [](const auto&) { return false; },
                    },
                    node_);
}

MeasureField constant_field(double c, double p) { return MeasureField(ConstantField{c, 0}, p); }

MeasureField distance_field(DiscreteMeasure target, double offset, double p) {
  return MeasureField(DistanceField{std::move(target), offset}, p);
}

MeasureField busemann_field(WassersteinRay ray, BusemannParams params) {
  const double p = ray.p();
  BusemannRayField f;
  f.ray = std::make_shared<const WassersteinRay>(std::move(ray));
  f.params = params;
  return MeasureField(std::move(f), p);
}

MeasureField dlc_field(MeasureSetSequence seq, std::size_t dim, double p, DlcParams params) {
  return MeasureField(DlcLimitField{std::move(seq), params, dim}, p);
}

MeasureField lift(const BaseScalarField& u, double p) { return MeasureField(LiftedField{u}, p); }

MeasureField inf_of_fields(std::vector<MeasureField> fields) {
  if (fields.empty()) throw Error(ErrorCode::EmptyCollection, "inf of no fields");
  if (fields.size() == 1) return std::move(fields.front());
  const double p = fields.front().p();
  std::size_t dim = 0;
  for (const auto& f : fields) {
    if (f.p() != p) throw Error(ErrorCode::DomainError, "inf_of_fields needs a common p");
    const std::size_t d = field_dim(f);
    if (d != 0) {
      if (dim != 0) require_same_dim(dim, d, "inf_of_fields");
      dim = d;
    }
  }
  return MeasureField(InfField{std::move(fields)}, p);
}

double eval_field(const MeasureField& U, const DiscreteMeasure& omega) {
  const std::size_t d = field_dim(U);
  if (d != 0) require_same_dim(d, omega.dim(), "eval_field");
  return std::visit(
      Overloaded{
          [&](const LiftedField& f) { return integrate(omega, f.base); },
          [&](const DistanceField& f) { return wasserstein(omega, f.target, U.p()) - f.offset; },
          [&](const BusemannRayField& f) {
            auto key = cache_key(omega);
            {
              std::lock_guard<std::mutex> lock(f.cache->mutex);
              if (auto it = f.cache->values.find(key); it != f.cache->values.end()) {
                return it->second;
              }
            }
            const double v = busemann_estimate(*f.ray, omega, f.params.tol, f.params.t_max).value;
            std::lock_guard<std::mutex> lock(f.cache->mutex);
            f.cache->values.emplace(std::move(key), v);
            return v;
          },
          [&](const DlcLimitField& f) {
            return dlc_limit(f.sequence, omega, U.p(), f.params.tol, f.params.n_max).value;
          },
          [&](const InfField& f) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& m : f.members) best = std::min(best, eval_field(m, omega));
            return best;
          },
          [&](const ConstantField& f) { return f.value; },
      },
      U.node());
}

LipschitzProbe lipschitz_probe(
    const MeasureField& U, const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::NoUsablePairs, "empty pair list");
  LipschitzProbe probe;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double w = wasserstein(pairs[k].first, pairs[k].second, U.p());
    if (w <= kDegenerateDistance) continue;
    const double ratio = std::abs(eval_field(U, pairs[k].first) - eval_field(U, pairs[k].second)) / w;
    if (probe.used_pairs == 0 || ratio > probe.max_ratio) {
      probe.max_ratio = ratio;
      probe.argmax = k;
    }
    ++probe.used_pairs;
  }
  if (probe.used_pairs == 0) throw Error(ErrorCode::NoUsablePairs, "all pairs are degenerate");
  return probe;
}

SlopeEstimate local_slope_estimate(const MeasureField& U, const DiscreteMeasure& omega,
                                   const std::vector<double>& radii, std::size_t budget,
                                   Rng& rng) {
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1]))) {
      throw Error(ErrorCode::DomainError, "radii must be positive and decreasing");
    }
  }
  SlopeEstimate est;
  est.radii = radii;
  const double u0 = eval_field(U, omega);
  auto consider = [&](Witness w) {
    if (w.distance <= kDegenerateDistance) return;
    const double ratio = std::max(0.0, w.drop()) / w.distance;
    if (!est.witness || ratio > est.value) {
      est.value = ratio;
      est.witness = std::move(w);
    }
  };
  for (double r : radii) {
    auto analytic = analytic_candidate(U, omega, r);
    const auto samples = try_sphere(omega, r, U.p(), budget, rng);
    if (!analytic && samples.empty()) {
      est.skipped_radii.push_back(r);
      continue;
    }
    if (analytic) consider(make_witness(U, omega, u0, std::move(*analytic), "analytic"));
    for (const auto& s : samples) {
      Witness w{s.measure, s.distance, u0, eval_field(U, s.measure), to_string(s.strategy)};
      consider(std::move(w));
    }
  }
  return est;
}

SlopeEstimate global_slope_estimate(const MeasureField& U, const DiscreteMeasure& omega,
                                    const std::vector<DiscreteMeasure>& dictionary) {
  if (dictionary.empty()) throw Error(ErrorCode::NoUsablePairs, "empty dictionary");
  SlopeEstimate est;
  const double u0 = eval_field(U, omega);
  for (const auto& x : dictionary) {
    Witness w = make_witness(U, omega, u0, x, "dictionary");
    if (w.distance <= kDegenerateDistance) continue;
    const double ratio = std::max(0.0, w.drop()) / w.distance;
    if (!est.witness || ratio > est.value) {
      est.value = ratio;
      est.witness = std::move(w);
    }
  }
  if (!est.witness) throw Error(ErrorCode::NoUsablePairs, "dictionary only contains omega");
  return est;
}

SphereTestReport viscosity_sphere_test(const MeasureField& U, const DiscreteMeasure& omega,
                                       const std::vector<double>& radii, double eps,
                                       std::size_t budget, Rng& rng) {
  if (radii.empty() || budget == 0 || !(eps > 0.0)) {
    throw Error(ErrorCode::DomainError, "sphere test needs radii, budget and eps > 0");
  }
  SphereTestReport rep;
  rep.eps = eps;
  const double u0 = eval_field(U, omega);
  bool any_empty = false;
  bool all_pass = true;
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "radius must be positive");
    RadiusResult res;
    res.radius = r;
    res.best_gap = std::numeric_limits<double>::infinity();
    auto check = [&](Witness w) {
      ++res.candidates;
      const double gap = w.distance - w.drop();
      res.best_gap = std::min(res.best_gap, gap);
      if (!res.witness && w.drop() >= w.distance * (1.0 - eps)) res.witness = std::move(w);
    };
    if (auto a = analytic_candidate(U, omega, r)) {
      check(make_witness(U, omega, u0, std::move(*a), "analytic"));
    }
    if (!res.witness) {
      for (const auto& s : try_sphere(omega, r, U.p(), budget, rng)) {
        check(Witness{s.measure, s.distance, u0, eval_field(U, s.measure), to_string(s.strategy)});
        if (res.witness) break;
      }
    }
    if (res.witness) {
      res.verdict = Verdict::Pass;
    } else if (res.candidates == 0) {
      res.verdict = Verdict::Inconclusive;
      any_empty = true;
    } else {
      res.verdict = U.analytically_complete() ? Verdict::Fail : Verdict::Inconclusive;
    }
    all_pass = all_pass && res.verdict == Verdict::Pass;
    rep.radii.push_back(std::move(res));
  }
  if (all_pass) {
    rep.verdict = Verdict::Pass;
  } else if (any_empty || !U.analytically_complete()) {
    rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = Verdict::Fail;
  }
  return rep;
}

DlgReport dlg_test(const MeasureField& U, const DiscreteMeasure& omega,
                   const std::vector<double>& levels, std::size_t budget, Rng& rng, double eps) {
  if (levels.empty()) throw Error(ErrorCode::DomainError, "no levels given");
  DlgReport rep;
  rep.eps = eps;
  const double u0 = eval_field(U, omega);
  for (double c : levels) {
    if (!(c < u0)) {
      throw Error(ErrorCode::DomainError, "level " + std::to_string(c) +
                                              " is not strictly below U(omega) = " +
                                              std::to_string(u0));
    }
  }
  bool any_fail = false;
  bool all_pass = true;
  for (double c : levels) {
    LevelResult res;
    res.level = c;
    const double r = u0 - c;
    auto admissible = [&](const Witness& w) {
      return w.value_at_witness <= c + kLevelSlack && w.distance <= r + eps;
    };
    if (auto a = analytic_candidate(U, omega, r)) {
      Witness w = make_witness(U, omega, u0, std::move(*a), "analytic");
      if (admissible(w)) res.witness = std::move(w);
    }
    if (!res.witness && !std::holds_alternative<ConstantField>(U.node())) {
      for (const auto& s : try_sphere(omega, r, U.p(), budget, rng)) {
        Witness w{s.measure, s.distance, u0, eval_field(U, s.measure), to_string(s.strategy)};
        if (admissible(w)) {
          res.witness = std::move(w);
          break;
        }
      }
    }
    if (res.witness) {
      res.verdict = Verdict::Pass;
    } else {
      res.verdict = U.analytically_complete() ? Verdict::Fail : Verdict::Inconclusive;
    }
    any_fail = any_fail || res.verdict == Verdict::Fail;
    all_pass = all_pass && res.verdict == Verdict::Pass;
    rep.levels.push_back(std::move(res));
  }
  rep.verdict = all_pass ? Verdict::Pass : (any_fail ? Verdict::Fail : Verdict::Inconclusive);
  return rep;
}

double DescentPolyline::max_slack() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      worst = std::max(worst, (times[j] - times[i]) - (values[i] - values[j]));
    }
  }
  return vertices.size() < 2 ? 0.0 : worst;
}

DescentPolyline greedy_descent(const MeasureField& U, const DiscreteMeasure& omega, double eps,
                               std::size_t steps, Rng& rng, const DescentOptions& options) {
  if (!(eps > 0.0)) throw Error(ErrorCode::DomainError, "eps must be positive");
  if (steps == 0) throw Error(ErrorCode::DomainError, "steps must be >= 1");
  if (!(options.step > 0.0)) throw Error(ErrorCode::DomainError, "step length must be positive");

  DescentPolyline line;
  line.epsilon = eps;
  line.vertices.push_back(omega);
  line.times.push_back(0.0);
  line.values.push_back(eval_field(U, omega));
  line.distance_from_start.push_back(0.0);

  double allowance = eps;
  for (std::size_t k = 0; k < steps; ++k) {
    allowance /= 2.0;  // eps / 2^{k+1}
    const DiscreteMeasure& v = line.vertices.back();
    const double uv = line.values.back();
    std::optional<Witness> chosen;
    double best_gap = std::numeric_limits<double>::infinity();
    auto consider = [&](Witness w) {
      const double gap = w.distance - w.drop();
      best_gap = std::min(best_gap, gap);
      if (gap > allowance) return;
      if (!chosen || gap < chosen->distance - chosen->drop()) chosen = std::move(w);
    };
    if (options.analytic_candidate) {
      if (auto a = analytic_candidate(U, v, options.step)) {
        consider(make_witness(U, v, uv, std::move(*a), "analytic"));
      }
    }
    if (!chosen) {
      for (const auto& s : try_sphere(v, options.step, U.p(), options.budget, rng)) {
        consider(Witness{s.measure, s.distance, uv, eval_field(U, s.measure), to_string(s.strategy)});
      }
    }
    if (!chosen) {
      line.stall = DescentStall{k + 1, best_gap};
      break;
    }
    line.drops.push_back(chosen->drop());
    line.times.push_back(line.times.back() + chosen->distance);
    line.values.push_back(chosen->value_at_witness);
    line.distance_from_start.push_back(wasserstein(omega, chosen->measure, U.p()));
    line.vertices.push_back(std::move(chosen->measure));
  }
  return line;
}

WassersteinRay lifted_ray(const MeasureField& U, const DiscreteMeasure& omega) {
  const auto* lifted = std::get_if<LiftedField>(&U.node());
  if (lifted == nullptr) throw Error(ErrorCode::UnsupportedField, "lifted_ray needs a lifted field");
  std::vector<BaseRay> rays;
  rays.reserve(omega.size());
  for (const auto& x : omega.support()) rays.push_back(base_negative_gradient_ray(lifted->base, x));
  return WassersteinRay(omega, std::move(rays), U.p());
}

RepresentationReport representation_check(const MeasureField& U, const DiscreteMeasure& omega,
                                          const std::vector<WassersteinRay>& rays,
                                          BusemannParams params) {
  RepresentationReport rep;
  rep.value = eval_field(U, omega);
  for (std::size_t k = 0; k < rays.size(); ++k) {
    const double start = eval_field(U, rays[k].eval(0.0));
    for (double t : {1.0, 10.0}) {
      const double drop = start - eval_field(U, rays[k].eval(t));
      if (std::abs(drop - t) > kCalibrationProbeTol) {
        throw Error(ErrorCode::InvalidRay, "ray " + std::to_string(k) + " drops U by " +
                                               std::to_string(drop) + " over length " +
                                               std::to_string(t));
      }
    }
  }
  bool ok = true;
  for (const auto& ray : rays) {
    RayCheck rc;
    rc.start_value = eval_field(U, ray.eval(0.0));
    rc.busemann = busemann_estimate(ray, omega, params.tol, params.t_max);
    rc.bound = rc.start_value + rc.busemann.value;
    rc.holds = rep.value <= rc.bound + kRepresentationTol;
    ok = ok && rc.holds;
    rep.rays.push_back(std::move(rc));
  }
  if (const auto* f = std::get_if<LiftedField>(&U.node()); f && f->base.has_analytic_ray()) {
    rep.own_ray = busemann_estimate(lifted_ray(U, omega), omega, params.tol, params.t_max);
    ok = ok && std::abs(rep.own_ray->value) <= kRepresentationTol;
  }
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  return rep;
}

}  // namespace wvlab
