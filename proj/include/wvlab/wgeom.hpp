#pragma once

// Geometry of the Wasserstein space over R^d: displacement interpolation,
// rays built from per-atom base rays, truncated Busemann limits, certified
// sphere sampling, the co-ray compactness diagnostic and distance-like limits.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wvlab/base_space.hpp"
#include "wvlab/discrete_measure.hpp"
#include "wvlab/ot_exact.hpp"
#include "wvlab/random.hpp"

namespace wvlab {

/// Constant-speed geodesic obtained by moving coupled mass along straight
/// lines. Parameterized by arc length t in [0, length()].
class WassersteinPath {
 public:
  WassersteinPath(DiscreteMeasure source, DiscreteMeasure target, TransportResult transport);

  const DiscreteMeasure& source() const noexcept { return source_; }
  const DiscreteMeasure& target() const noexcept { return target_; }
  const Coupling& coupling() const noexcept { return transport_.plan; }
  double p() const noexcept { return transport_.p; }
  double length() const noexcept { return transport_.value; }

  /// Zero-length path; eval returns the source for every t.
  bool degenerate() const noexcept { return length() == 0.0; }
  /// p = 1 geodesics exist but are not unique.
  bool non_unique() const noexcept { return p() == 1.0; }

  DiscreteMeasure eval(double t) const;

 private:
  DiscreteMeasure source_;
  DiscreteMeasure target_;
  TransportResult transport_;
};

WassersteinPath displacement_path(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Same as path.eval(t); throws DomainError for t outside [0, L].
DiscreteMeasure path_eval(const WassersteinPath& path, double t);

/// t -> sum_i w_i delta_{gamma_i(t)} for unit-speed base rays gamma_i, one per
/// atom of the base measure. Construction certifies with the solver that the
/// curve realizes distances, W_p(eval(0), eval(T)) = T for T in {1, 10, 1000}.
class WassersteinRay {
 public:
  WassersteinRay(DiscreteMeasure base, std::vector<BaseRay> atom_rays, double p);

  const DiscreteMeasure& base() const noexcept { return base_; }
  const std::vector<BaseRay>& atom_rays() const noexcept { return rays_; }
  double p() const noexcept { return p_; }

  DiscreteMeasure eval(double t) const;

 private:
  DiscreteMeasure base_;
  std::vector<BaseRay> rays_;
  double p_;
};

struct BusemannSample {
  double t;
  double g;  ///< W_p(omega, ray(t)) - t
};

/// Truncated value of lim_t [W_p(omega, ray(t)) - t]. The sampled sequence is
/// non-increasing and bounded below, so the last doubling increment is a
/// convergence certificate only up to the unobserved tail.
struct BusemannEstimate {
  double value = 0.0;
  double truncation = 0.0;  ///< last t sampled
  double tail_gap = 0.0;    ///< |g(last) - g(previous)|
  bool converged = false;
  std::vector<BusemannSample> samples;
};

BusemannEstimate busemann_estimate(const WassersteinRay& ray, const DiscreteMeasure& omega,
                                   double tol = 1e-6, double t_max = 1e6);

enum class SphereStrategy { Translation, AtomShift, Transport };

std::string to_string(SphereStrategy s);

struct SphereSample {
  DiscreteMeasure measure;
  double distance;  ///< certified W_p(omega, measure)
  SphereStrategy strategy;
};

struct SphereSampleOptions {
  bool translation = true;
  bool atom_shift = true;
  bool transport = true;
  /// Accepted band for certified distances, as fractions of r.
  double band_low = 0.9;
  double band_high = 1.1;
};

/// Up to `budget` measures whose solver-certified distance to omega lies in
/// [0.9 r, 1.1 r]. Strategies are cycled; throws SphereSamplingFailed when no
/// in-band sample was found.
std::vector<SphereSample> sphere_sample(const DiscreteMeasure& omega, double r, double p,
                                        std::size_t budget, Rng& rng,
                                        const SphereSampleOptions& options = {});

using MeasureSequence = std::function<DiscreteMeasure(std::int64_t)>;

struct CsParams {
  double sigma = 1.0;
  std::int64_t first_index = 1;
  std::size_t count = 20;  ///< N
  double eps = 0.1;
  std::size_t cluster = 2;  ///< K
  double p = 2.0;
};

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

/// Heuristic check of the co-ray compactness condition: sphere points
/// s_n = path(omega0 -> seq(n)).eval(sigma) and a cluster proxy for a
/// convergent subsequence (some point with >= K - 1 neighbours within eps).
struct CsReport {
  Verdict verdict = Verdict::Inconclusive;
  CsParams params;
  std::vector<std::int64_t> indices;
  std::vector<std::vector<double>> matrix;
  double min_offdiagonal = 0.0;
  std::size_t best_neighbours = 0;
  std::size_t best_center = 0;
};

CsReport cs_diagnostic(const MeasureSequence& seq, const DiscreteMeasure& omega0,
                       const CsParams& params);

struct DlcSample {
  std::int64_t n;
  double value;  ///< min_{h in H_n} W_p(omega, h) - c_n
};

struct DlcResult {
  double value = 0.0;
  bool converged = false;
  std::vector<DlcSample> samples;
};

/// a_n = W_p(omega, H_n) - c_n for n = 1, 2, 4, ... and finally n_max.
DlcResult dlc_limit(const MeasureSetSequence& seq, const DiscreteMeasure& omega, double p,
                    double tol, std::int64_t n_max);

}  // namespace wvlab
