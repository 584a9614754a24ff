#include "wvlab/wgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wvlab/error.hpp"

namespace wvlab {

namespace {

constexpr double kRayCertifyTol = 1e-8;

bool in_band(double d, double r, const SphereSampleOptions& o) {
  return d >= o.band_low * r && d <= o.band_high * r;
}

DiscreteMeasure shift_atom(const DiscreteMeasure& m, std::size_t atom, const BasePoint& delta) {
  std::vector<BasePoint> support = m.support();
  support[atom] = support[atom] + delta;
  return validate_measure(std::move(support), m.weights());
}

// W_p(omega, ray(t)) - t without forming W_p itself. Every atom of ray(t) is
// at distance t + O(1) from omega, so the costs are shifted by t^p (which does
// not change the optimal plan) and the shift is cancelled analytically; the
// plain difference would lose about t * 1e-16 to rounding.
double ray_excess(const WassersteinRay& ray, const DiscreteMeasure& omega, double t) {
  const double p = ray.p();
  const auto& rays = ray.atom_rays();
  const double tp = std::pow(t, p);
  std::vector<double> cost;
  cost.reserve(omega.size() * rays.size());
  for (const auto& x : omega.support()) {
    for (const auto& r : rays) {
      const BasePoint a = x - r.origin;
      const double q = (dot(a, a) - 2.0 * t * dot(a, r.direction.vec())) / (t * t);
      cost.push_back(tp * std::expm1(0.5 * p * std::log1p(std::max(q, -1.0))));
    }
  }
  const double shifted =
      min_cost_transport(omega.weights(), ray.base().weights(), std::move(cost)).objective;
  return t * std::expm1(std::log1p(std::max(shifted / tp, -1.0)) / p);
}

}  // namespace

WassersteinPath::WassersteinPath(DiscreteMeasure source, DiscreteMeasure target,
                                 TransportResult transport)
    : source_(std::move(source)), target_(std::move(target)), transport_(std::move(transport)) {
  if (transport_.plan.rows != source_.size() || transport_.plan.cols != target_.size()) {
    throw Error(ErrorCode::DimensionError, "coupling does not match path endpoints");
  }
}

DiscreteMeasure WassersteinPath::eval(double t) const {
  const double len = length();
  // absorb rounding in callers that compute t = L from sums
  if (t > len && t <= len * (1.0 + 1e-12)) t = len;
  if (!(t >= 0.0 && t <= len)) {
    throw Error(ErrorCode::DomainError, "path time " + std::to_string(t) + " outside [0, " +
                                            std::to_string(len) + "]");
  }
  if (degenerate() || t == 0.0) return source_;
  if (t == len) return target_;
  const double s = t / len;
  std::vector<BasePoint> support;
  std::vector<double> weights;
  support.reserve(coupling().entries.size());
  for (const auto& e : coupling().entries) {
    support.push_back(base_geodesic_eval(source_.atom(e.row), target_.atom(e.col), s));
    weights.push_back(e.mass);
  }
  return validate_measure(std::move(support), std::move(weights));
}

WassersteinPath displacement_path(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return WassersteinPath(mu, nu, wasserstein_exact(mu, nu, p));
}

DiscreteMeasure path_eval(const WassersteinPath& path, double t) { return path.eval(t); }

WassersteinRay::WassersteinRay(DiscreteMeasure base, std::vector<BaseRay> atom_rays, double p)
    : base_(std::move(base)), rays_(std::move(atom_rays)), p_(p) {
  if (rays_.size() != base_.size()) {
    throw Error(ErrorCode::InvalidRay, "need exactly one base ray per atom");
  }
  for (std::size_t i = 0; i < rays_.size(); ++i) {
    require_same_dim(base_.dim(), rays_[i].origin.dim(), "WassersteinRay");
    if (std::abs(rays_[i].speed - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidRay, "atom rays must have unit speed");
    }
    if (distance(rays_[i].origin, base_.atom(i)) > 1e-12) {
      throw Error(ErrorCode::InvalidRay, "atom ray does not start at its atom");
    }
  }
  for (double t : {1.0, 10.0, 1000.0}) {
    const double w = wasserstein(base_, eval(t), p_);
    if (std::abs(w - t) > kRayCertifyTol * std::max(1.0, t)) {
      throw Error(ErrorCode::InvalidRay, "curve is not distance-realizing: W_p(eval(0), eval(" +
                                             std::to_string(t) + ")) = " + std::to_string(w));
    }
  }
}

DiscreteMeasure WassersteinRay::eval(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorCode::DomainError, "ray time must be >= 0");
  std::vector<BasePoint> support;
  support.reserve(rays_.size());
  for (const auto& r : rays_) support.push_back(ray_eval(r, t));
  return validate_measure(std::move(support), base_.weights());
}

BusemannEstimate busemann_estimate(const WassersteinRay& ray, const DiscreteMeasure& omega,
                                   double tol, double t_max) {
  if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tol must be positive");
  if (!(t_max >= 1.0)) throw Error(ErrorCode::DomainError, "t_max must be >= 1");
  require_same_dim(ray.base().dim(), omega.dim(), "busemann_estimate");

  BusemannEstimate est;
  auto sample = [&](double t) {
    const double g = ray_excess(ray, omega, t);
    if (!est.samples.empty()) {
      const double prev = est.samples.back().g;
      if (g > prev + 1e-9) {
        throw Error(ErrorCode::NumericalInconsistency,
                    "Busemann samples increased at t = " + std::to_string(t));
      }
      est.tail_gap = std::abs(g - prev);
      est.converged = est.tail_gap <= tol;
    }
    est.samples.push_back({t, g});
  };

  double t = 1.0;
  sample(t);
  while (!est.converged) {
    const double next = 2.0 * t;
    if (next >= t_max) {
      if (t < t_max) sample(t_max);
      break;
    }
    t = next;
    sample(t);
  }
  est.value = est.samples.back().g;
  est.truncation = est.samples.back().t;
  return est;
}

std::string to_string(SphereStrategy s) {
  switch (s) {
    case SphereStrategy::Translation: return "translation";
    case SphereStrategy::AtomShift: return "atom-shift";
    case SphereStrategy::Transport: return "transport";
  }
  return "unknown";
}

std::vector<SphereSample> sphere_sample(const DiscreteMeasure& omega, double r, double p,
                                        std::size_t budget, Rng& rng,
                                        const SphereSampleOptions& options) {
  if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "sphere radius must be positive");
  if (budget == 0) throw Error(ErrorCode::DomainError, "sphere budget must be >= 1");
  std::vector<SphereStrategy> cycle;
  if (options.translation) cycle.push_back(SphereStrategy::Translation);
  if (options.atom_shift) cycle.push_back(SphereStrategy::AtomShift);
  if (options.transport) cycle.push_back(SphereStrategy::Transport);
  if (cycle.empty()) throw Error(ErrorCode::DomainError, "no sphere strategy enabled");

  const std::size_t d = omega.dim();
  std::uniform_int_distribution<std::size_t> pick_atom(0, omega.size() - 1);
  std::uniform_real_distribution<double> spread(1.0, 3.0);
  std::vector<SphereSample> out;
  const std::size_t attempts = 4 * budget;
  for (std::size_t a = 0; a < attempts && out.size() < budget; ++a) {
    const SphereStrategy s = cycle[a % cycle.size()];
    switch (s) {
      case SphereStrategy::Translation: {
        const BasePoint v = r * random_unit_vector(d, rng).vec();
        DiscreteMeasure m = translate(omega, v);
        const double w = wasserstein(omega, m, p);
        if (in_band(w, r, options)) out.push_back({std::move(m), w, s});
        break;
      }
      case SphereStrategy::AtomShift: {
        const std::size_t i = pick_atom(rng);
        const BasePoint u = random_unit_vector(d, rng).vec();
        double len = r / std::pow(omega.weight(i), 1.0 / p);
        for (int tries = 0; tries < 2; ++tries) {
          DiscreteMeasure m = shift_atom(omega, i, len * u);
          const double w = wasserstein(omega, m, p);
          if (in_band(w, r, options)) {
            out.push_back({std::move(m), w, s});
            break;
          }
          if (w <= 0.0) break;
          len *= r / w;
        }
        break;
      }
      case SphereStrategy::Transport: {
        std::vector<BasePoint> support;
        for (const auto& x : omega.support()) {
          support.push_back(x + (spread(rng) * r) * random_unit_vector(d, rng).vec());
        }
        const DiscreteMeasure target = validate_measure(std::move(support), omega.weights());
        const WassersteinPath path = displacement_path(omega, target, p);
        if (path.length() < r) break;
        DiscreteMeasure m = path.eval(r);
        const double w = wasserstein(omega, m, p);
        if (in_band(w, r, options)) out.push_back({std::move(m), w, s});
        break;
      }
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::SphereSamplingFailed,
                "no certified sample within the band at r = " + std::to_string(r));
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

CsReport cs_diagnostic(const MeasureSequence& seq, const DiscreteMeasure& omega0,
                       const CsParams& params) {
  if (!(params.sigma > 0.0)) throw Error(ErrorCode::DomainError, "sigma must be positive");
  if (params.cluster < 2 || params.count < params.cluster) {
    throw Error(ErrorCode::DomainError, "need N >= K >= 2");
  }
  CsReport rep;
  rep.params = params;
  std::vector<DiscreteMeasure> sphere;
  for (std::size_t k = 0; k < params.count; ++k) {
    const std::int64_t n = params.first_index + static_cast<std::int64_t>(k);
    const WassersteinPath path = displacement_path(omega0, seq(n), params.p);
    if (!(path.length() > params.sigma)) {
      throw Error(ErrorCode::SequenceTooClose,
                  "element " + std::to_string(n) + " lies within sigma of the base point");
    }
    rep.indices.push_back(n);
    sphere.push_back(path.eval(params.sigma));
  }

  const std::size_t N = sphere.size();
  rep.matrix.assign(N, std::vector<double>(N, 0.0));
  rep.min_offdiagonal = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      const double w = wasserstein(sphere[a], sphere[b], params.p);
      rep.matrix[a][b] = rep.matrix[b][a] = w;
      rep.min_offdiagonal = std::min(rep.min_offdiagonal, w);
    }
  }
  for (std::size_t a = 0; a < N; ++a) {
    std::size_t neighbours = 0;
    for (std::size_t b = 0; b < N; ++b) {
      if (a != b && rep.matrix[a][b] <= params.eps) ++neighbours;
    }
    if (neighbours > rep.best_neighbours) {
      rep.best_neighbours = neighbours;
      rep.best_center = a;
    }
  }
  rep.verdict = rep.best_neighbours + 1 >= params.cluster ? Verdict::Pass : Verdict::Fail;
  return rep;
}

DlcResult dlc_limit(const MeasureSetSequence& seq, const DiscreteMeasure& omega, double p,
                    double tol, std::int64_t n_max) {
  if (n_max < 2) throw Error(ErrorCode::DomainError, "n_max must be >= 2");
  DlcResult res;
  auto sample = [&](std::int64_t n) {
    const std::vector<DiscreteMeasure> hs = seq.sets(n);
    if (hs.empty()) {
      throw Error(ErrorCode::EmptyCollection, "H_" + std::to_string(n) + " is empty");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& h : hs) best = std::min(best, wasserstein(omega, h, p));
    res.samples.push_back({n, best - seq.shift(n)});
  };
  std::int64_t n = 1;
  for (; n <= n_max; n *= 2) sample(n);
  if (res.samples.back().n != n_max) sample(n_max);
  const auto& s = res.samples;
  res.value = s.back().value;
  res.converged = std::abs(s[s.size() - 1].value - s[s.size() - 2].value) <= tol;
  return res;
}

}  // namespace wvlab
