#pragma once

// Functions on the Wasserstein space and the solver-backed checks of the
// metric eikonal equation: lifting, slope estimators, the sphere calibration
// test, dl_G witnesses, epsilon-descent, lifted rays and the Busemann
// representation check.
//
// Every search here is a witness search: a PASS carries a replayable witness
// (measure, certified distance, field values). A negative outcome is reported
// as FAIL only for fields whose candidate family is analytically complete
// (constants, lifted fields with known rays, and minima of those); otherwise
// it is INCONCLUSIVE.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wvlab/base_space.hpp"
#include "wvlab/discrete_measure.hpp"
#include "wvlab/random.hpp"
#include "wvlab/wgeom.hpp"

namespace wvlab {

class MeasureField;

/// omega -> integral of a base field against omega.
struct LiftedField {
  BaseScalarField base;
};

/// omega -> W_p(omega, target) - offset.
struct DistanceField {
  DiscreteMeasure target;
  double offset = 0.0;
};

struct BusemannParams {
  double tol = 1e-6;
  double t_max = 1e6;
};

/// omega -> truncated Busemann limit of a ray. Estimates are memoized per
/// omega; the cache is shared between copies and guarded by a mutex.
struct BusemannRayField {
  std::shared_ptr<const WassersteinRay> ray;
  BusemannParams params;

  struct Cache {
    std::mutex mutex;
    std::map<std::vector<double>, double> values;
  };
  std::shared_ptr<Cache> cache = std::make_shared<Cache>();
};

struct DlcParams {
  double tol = 1e-6;
  std::int64_t n_max = 1024;
};

/// omega -> lim_n [W_p(omega, H_n) - c_n].
struct DlcLimitField {
  MeasureSetSequence sequence;
  DlcParams params;
  std::size_t dim = 0;
};

struct InfField {
  std::vector<MeasureField> members;
};

struct ConstantField {
  double value = 0.0;
  std::size_t dim = 0;  ///< 0 accepts any dimension
};

/// Real function on P_p(R^d) restricted to discrete measures.
class MeasureField {
 public:
  using Node =
      std::variant<LiftedField, DistanceField, BusemannRayField, DlcLimitField, InfField,
                   ConstantField>;

  MeasureField(Node node, double p);

  const Node& node() const noexcept { return node_; }
  double p() const noexcept { return p_; }
  std::string kind() const;

  /// Constants, lifted fields whose base has an analytic ray, and minima of those.
  bool analytically_complete() const;

 private:
  Node node_;
  double p_;
};

MeasureField constant_field(double c, double p);
MeasureField distance_field(DiscreteMeasure target, double offset, double p);
MeasureField busemann_field(WassersteinRay ray, BusemannParams params = {});
MeasureField dlc_field(MeasureSetSequence seq, std::size_t dim, double p, DlcParams params = {});

/// The lifted field omega -> sum_i w_i u(x_i).
MeasureField lift(const BaseScalarField& u, double p);

MeasureField inf_of_fields(std::vector<MeasureField> fields);

double eval_field(const MeasureField& U, const DiscreteMeasure& omega);

struct LipschitzProbe {
  double max_ratio = 0.0;
  std::size_t used_pairs = 0;
  std::size_t argmax = 0;
};

/// max |U(a) - U(b)| / W_p(a, b) over pairs with W_p > 1e-10.
LipschitzProbe lipschitz_probe(const MeasureField& U,
                               const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs);

/// Candidate x near omega with its certified distance and field values.
struct Witness {
  DiscreteMeasure measure;
  double distance = 0.0;
  double value_at_omega = 0.0;
  double value_at_witness = 0.0;
  std::string source;  ///< "analytic" or a sphere strategy name

  double drop() const { return value_at_omega - value_at_witness; }
};

struct SlopeEstimate {
  double value = 0.0;  ///< certified lower bound on the slope
  std::vector<double> radii;
  std::optional<Witness> witness;
  std::vector<double> skipped_radii;  ///< radii where sphere sampling failed
};

/// Lower bound on the local slope: the best (U(omega) - U(x))^+ / W_p(omega, x)
/// over sphere samples and the analytic candidate at each radius.
SlopeEstimate local_slope_estimate(const MeasureField& U, const DiscreteMeasure& omega,
                                   const std::vector<double>& radii, std::size_t budget,
                                   Rng& rng);

/// Lower bound on the global slope over a dictionary of measures.
SlopeEstimate global_slope_estimate(const MeasureField& U, const DiscreteMeasure& omega,
                                    const std::vector<DiscreteMeasure>& dictionary);

struct RadiusResult {
  double radius = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::size_t candidates = 0;
  double best_gap = 0.0;  ///< min over candidates of distance - drop
  std::optional<Witness> witness;
};

struct SphereTestReport {
  Verdict verdict = Verdict::Inconclusive;
  double eps = 0.0;
  std::vector<RadiusResult> radii;
};

/// Searches, for each radius, a measure x with certified distance d to omega
/// and U(omega) - U(x) >= d (1 - eps). PASS needs a witness at every radius.
SphereTestReport viscosity_sphere_test(const MeasureField& U, const DiscreteMeasure& omega,
                                       const std::vector<double>& radii, double eps,
                                       std::size_t budget, Rng& rng);

struct LevelResult {
  double level = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Witness> witness;
};

struct DlgReport {
  Verdict verdict = Verdict::Inconclusive;
  double eps = 0.0;
  std::vector<LevelResult> levels;
};

/// For each level c < U(omega), looks for omega' with U(omega') <= c + 1e-9 and
/// W_p(omega, omega') <= U(omega) - c + eps.
DlgReport dlg_test(const MeasureField& U, const DiscreteMeasure& omega,
                   const std::vector<double>& levels, std::size_t budget, Rng& rng,
                   double eps = 1e-6);

struct DescentStall {
  std::size_t step = 0;
  double best_gap = 0.0;
};

struct DescentPolyline {
  std::vector<DiscreteMeasure> vertices;
  std::vector<double> times;   ///< cumulative certified arc length
  std::vector<double> values;  ///< U at each vertex
  std::vector<double> drops;   ///< per step
  std::vector<double> distance_from_start;
  double epsilon = 0.0;
  std::optional<DescentStall> stall;

  /// max over i < j of (t_j - t_i) - (U(v_i) - U(v_j)); at most epsilon.
  double max_slack() const;
};

struct DescentOptions {
  double step = 1.0;
  std::size_t budget = 8;
  bool analytic_candidate = true;
};

/// epsilon-negative-gradient polyline: step k accepts v_{k+1} with
/// U(v_k) - U(v_{k+1}) >= W_p(v_k, v_{k+1}) - eps / 2^{k+1}.
DescentPolyline greedy_descent(const MeasureField& U, const DiscreteMeasure& omega, double eps,
                               std::size_t steps, Rng& rng, const DescentOptions& options = {});

/// Per-atom negative gradient rays of the base field of a lifted field.
WassersteinRay lifted_ray(const MeasureField& U, const DiscreteMeasure& omega);

struct RayCheck {
  double start_value = 0.0;  ///< U(gamma(0))
  BusemannEstimate busemann;
  double bound = 0.0;  ///< U(gamma(0)) + b_gamma(omega)
  bool holds = false;
};

struct RepresentationReport {
  Verdict verdict = Verdict::Inconclusive;
  double value = 0.0;  ///< U(omega)
  std::vector<RayCheck> rays;
  std::optional<BusemannEstimate> own_ray;
};

/// Checks U(omega) <= U(gamma(0)) + b_gamma(omega) for every supplied ray and
/// that omega's own ray (lifted fields) has b = 0. Rays that do not calibrate
/// U on t in {0, 1, 10} are rejected with InvalidRay.
RepresentationReport representation_check(const MeasureField& U, const DiscreteMeasure& omega,
                                          const std::vector<WassersteinRay>& rays,
                                          BusemannParams params = {});

}  // namespace wvlab
