#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wvlab/base_space.hpp"

namespace wvlab {

/// What validate_measure had to do to an input.
struct ValidationNotes {
  bool renormalized = false;
  std::size_t merged = 0;
  std::size_t pruned = 0;
};

/// Finitely supported probability measure sum_i w_i delta_{x_i} on R^d.
///
/// Invariants, established by validate_measure and preserved by every
/// operation returning a DiscreteMeasure:
///  - weights sum to 1 within 1e-12, each weight >= 1e-15;
///  - support points pairwise farther apart than 1e-12.
class DiscreteMeasure {
 public:
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<BasePoint>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const BasePoint& atom(std::size_t i) const { return support_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  friend DiscreteMeasure validate_measure(std::vector<BasePoint>, std::vector<double>,
                                          ValidationNotes*);
  DiscreteMeasure() = default;

  std::vector<BasePoint> support_;
  std::vector<double> weights_;
  std::size_t dim_ = 0;
};

/// Merges coincident atoms (tolerance 1e-12, first occurrence keeps its
/// coordinates), prunes weights below 1e-15 and renormalizes when the total
/// is off by at most 1e-9. Idempotent on its own output.
DiscreteMeasure validate_measure(std::vector<BasePoint> support, std::vector<double> weights,
                                 ValidationNotes* notes = nullptr);

DiscreteMeasure dirac(BasePoint x);

/// Uniform weights 1/n on the given atoms.
DiscreteMeasure uniform_measure(std::vector<BasePoint> support);

/// sum_i w_i |x_i - x0|^p.
double p_moment(const DiscreteMeasure& m, double p, const BasePoint& x0);

using PointMap = std::function<BasePoint(const BasePoint&)>;

DiscreteMeasure push_forward(const DiscreteMeasure& m, const PointMap& f);
DiscreteMeasure translate(const DiscreteMeasure& m, const BasePoint& v);

/// Integral of a base field against the measure, sum_i w_i u(x_i).
double integrate(const DiscreteMeasure& m, const BaseScalarField& u);

/// Family n -> H_n of finite measure sets together with shifts c_n, generated
/// lazily so limits in n can be probed without precomputation.
struct MeasureSetSequence {
  std::function<std::vector<DiscreteMeasure>(std::int64_t)> sets;
  std::function<double(std::int64_t)> shift;
};

}  // namespace wvlab
