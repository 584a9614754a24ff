#pragma once

// Seeded generators for points, directions and measures. Every randomized
// procedure in the library draws from an Rng passed by the caller, so a seed
// fully determines a run.

#include <cstddef>
#include <cstdint>
#include <random>

#include "wvlab/base_space.hpp"
#include "wvlab/discrete_measure.hpp"

namespace wvlab {

using Rng = std::mt19937_64;

UnitVector random_unit_vector(std::size_t dim, Rng& rng);

/// Point with coordinates uniform in [-half_width, half_width].
BasePoint random_point(std::size_t dim, double half_width, Rng& rng);

/// Measure with `atoms` atoms uniform in the box and weights drawn from
/// [0.1, 1] then normalized.
DiscreteMeasure random_measure(std::size_t dim, std::size_t atoms, double half_width, Rng& rng);

/// Same but with uniform weights 1/atoms.
DiscreteMeasure random_uniform_measure(std::size_t dim, std::size_t atoms, double half_width,
                                       Rng& rng);

}  // namespace wvlab
