#pragma once

// Exact p-Wasserstein distances between discrete measures.
//
// Three independent routes are provided: a transportation simplex for the
// general case, the monotone (quantile) coupling on the line, and vertex
// enumeration of the transportation polytope for tiny instances. The last two
// exist as oracles for the first.

#include <cstddef>
#include <string_view>
#include <vector>

#include "wvlab/discrete_measure.hpp"

namespace wvlab {

struct PlanEntry {
  std::size_t row;
  std::size_t col;
  double mass;
};

/// Transport plan between a source with `rows` atoms and a target with `cols`.
struct Coupling {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<PlanEntry> entries;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  /// Max deviation of the marginals from the measures' weights.
  double marginal_error(const DiscreteMeasure& source, const DiscreteMeasure& target) const;
};

enum class SolverKind { Simplex, Quantile1D, BruteForce };

std::string_view to_string(SolverKind s) noexcept;

struct TransportResult {
  double value = 0.0;  ///< W_p
  double cost = 0.0;   ///< W_p^p
  double p = 1.0;
  Coupling plan;
  SolverKind solver = SolverKind::Simplex;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  /// 0 selects the default cap 10 * (n + m)^2.
  std::size_t max_iterations = 0;
};

/// Ground cost |x - y|^p with Euclidean distances below 1e-12 treated as 0.
double ground_cost(const BasePoint& x, const BasePoint& y, double p);

/// Transportation simplex (north-west corner start, MODI potentials, Dantzig
/// pricing with Bland's rule during degenerate stretches). Returns an optimal
/// vertex of the transportation polytope. Dirac marginals short-circuit to the
/// unique product coupling.
TransportResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const SimplexOptions& options = {});

struct LinearTransport {
  double objective = 0.0;
  Coupling plan;
  std::size_t iterations = 0;
};

/// Transportation simplex on an explicit row-major cost matrix. Supplies and
/// demands must each sum to one.
LinearTransport min_cost_transport(const std::vector<double>& supply,
                                   const std::vector<double>& demand,
                                   std::vector<double> cost, const SimplexOptions& options = {});

/// Convenience: wasserstein_exact(...).value.
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Monotone quantile coupling on R (d = 1 only).
TransportResult wasserstein_1d_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      double p);

/// Exhaustive search: permutations when both measures are uniform with
/// n = m <= 7, otherwise every spanning-tree basis of the transportation
/// polytope when n + m <= 10.
TransportResult brute_force_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

}  // namespace wvlab
