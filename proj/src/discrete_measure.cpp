#include "wvlab/discrete_measure.hpp"

#include <cmath>
#include <string>

#include "wvlab/error.hpp"

namespace wvlab {

namespace {

constexpr double kMergeTolerance = 1e-12;
constexpr double kPruneBelow = 1e-15;
constexpr double kSumTolerance = 1e-12;
// a decimal total of 1 +- 1e-9 lands a few ulps past 1e-9 once summed
constexpr double kRenormalizeTolerance = 1e-9 + 1e-15;

}  // namespace

DiscreteMeasure validate_measure(std::vector<BasePoint> support, std::vector<double> weights,
                                 ValidationNotes* notes) {
  if (support.empty()) throw Error(ErrorCode::EmptyMeasure, "measure has no atoms");
  if (support.size() != weights.size()) {
    throw Error(ErrorCode::InvalidMeasure, "support and weights differ in length");
  }
  const std::size_t d = support.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    require_same_dim(d, support[i].dim(), "validate_measure");
    if (!std::isfinite(weights[i])) {
      throw Error(ErrorCode::InvalidWeight, "weight " + std::to_string(i) + " is not finite");
    }
    if (weights[i] < 0.0) {
      throw Error(ErrorCode::InvalidWeight, "weight " + std::to_string(i) + " is negative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > kRenormalizeTolerance) {
    throw Error(ErrorCode::NotNormalized, "weights sum to " + std::to_string(total));
  }

  ValidationNotes local;
  std::vector<BasePoint> kept;
  std::vector<double> mass;
  for (std::size_t i = 0; i < support.size(); ++i) {
    bool merged = false;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (distance(kept[k], support[i]) <= kMergeTolerance) {
        mass[k] += weights[i];
        merged = true;
        ++local.merged;
        break;
      }
    }
    if (!merged) {
      kept.push_back(std::move(support[i]));
      mass.push_back(weights[i]);
    }
  }

  auto prune = [&] {
    std::size_t out = 0;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (mass[k] < kPruneBelow) {
        ++local.pruned;
        continue;
      }
      if (out != k) {
        kept[out] = std::move(kept[k]);
        mass[out] = mass[k];
      }
      ++out;
    }
    kept.resize(out);
    mass.resize(out);
  };
  prune();
  if (kept.empty()) throw Error(ErrorCode::EmptyMeasure, "all weights pruned");

  double sum = 0.0;
  for (double w : mass) sum += w;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    for (double& w : mass) w /= sum;
    local.renormalized = true;
    prune();
  }

  if (notes != nullptr) *notes = local;
  DiscreteMeasure m;
  m.support_ = std::move(kept);
  m.weights_ = std::move(mass);
  m.dim_ = d;
  return m;
}

DiscreteMeasure dirac(BasePoint x) { return validate_measure({std::move(x)}, {1.0}); }

DiscreteMeasure uniform_measure(std::vector<BasePoint> support) {
  const std::size_t n = support.size();
  if (n == 0) throw Error(ErrorCode::EmptyMeasure, "uniform measure on no atoms");
  return validate_measure(std::move(support), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double p_moment(const DiscreteMeasure& m, double p, const BasePoint& x0) {
  if (!(p >= 1.0)) throw Error(ErrorCode::DomainError, "moment exponent must be >= 1");
  require_same_dim(m.dim(), x0.dim(), "p_moment");
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.weight(i) * std::pow(distance(m.atom(i), x0), p);
  return s;
}

DiscreteMeasure push_forward(const DiscreteMeasure& m, const PointMap& f) {
  std::vector<BasePoint> image;
  image.reserve(m.size());
  for (const auto& x : m.support()) {
    try {
      image.push_back(f(x));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainError) {
        throw Error(ErrorCode::MapRangeError, "map produced a non-finite point");
      }
      throw;
    }
  }
  return validate_measure(std::move(image), m.weights());
}

DiscreteMeasure translate(const DiscreteMeasure& m, const BasePoint& v) {
  require_same_dim(m.dim(), v.dim(), "translate");
  return push_forward(m, [&](const BasePoint& x) { return x + v; });
}

double integrate(const DiscreteMeasure& m, const BaseScalarField& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.weight(i) * eval_base_field(u, m.atom(i));
  return s;
}

}  // namespace wvlab
