#include "wvlab/random.hpp"

#include <cmath>
#include <vector>

namespace wvlab {

UnitVector random_unit_vector(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    std::vector<double> v(dim);
    double n2 = 0.0;
    for (double& c : v) {
      c = gauss(rng);
      n2 += c * c;
    }
    if (n2 < 1e-20) continue;
    const double n = std::sqrt(n2);
    for (double& c : v) c /= n;
    return UnitVector(std::move(v));
  }
}

BasePoint random_point(std::size_t dim, double half_width, Rng& rng) {
  std::uniform_real_distribution<double> coord(-half_width, half_width);
  std::vector<double> v(dim);
  for (double& c : v) c = coord(rng);
  return BasePoint(std::move(v));
}

DiscreteMeasure random_measure(std::size_t dim, std::size_t atoms, double half_width, Rng& rng) {
  std::uniform_real_distribution<double> mass(0.1, 1.0);
  std::vector<BasePoint> support;
  std::vector<double> weights;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    support.push_back(random_point(dim, half_width, rng));
    weights.push_back(mass(rng));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  return validate_measure(std::move(support), std::move(weights));
}

DiscreteMeasure random_uniform_measure(std::size_t dim, std::size_t atoms, double half_width,
                                       Rng& rng) {
  std::vector<BasePoint> support;
  for (std::size_t i = 0; i < atoms; ++i) support.push_back(random_point(dim, half_width, rng));
  return uniform_measure(std::move(support));
}

}  // namespace wvlab
