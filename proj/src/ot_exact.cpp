#include "wvlab/ot_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wvlab/error.hpp"

namespace wvlab {

namespace {

constexpr double kZeroDistance = 1e-12;

double root_p(double cost, double p) {
  if (cost <= 0.0) return 0.0;
  double v;
  if (p == 1.0) {
    v = cost;
  } else if (p == 2.0) {
    v = std::sqrt(cost);
  } else if (p == 3.0) {
    v = std::cbrt(cost);
  } else {
    v = std::pow(cost, 1.0 / p);
  }
  return v < kZeroDistance ? 0.0 : v;
}

void check_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                  const char* where) {
  require_same_dim(mu.dim(), nu.dim(), where);
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::DomainError, std::string(where) + ": exponent p must be >= 1");
  }
}

TransportResult finish(double cost, double p, Coupling plan, SolverKind solver,
                       std::size_t iterations = 0) {
  TransportResult r;
  r.value = root_p(cost, p);
  r.cost = r.value == 0.0 ? 0.0 : cost;
  r.p = p;
  r.plan = std::move(plan);
  r.solver = solver;
  r.iterations = iterations;
  return r;
}

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  std::vector<double> c(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) c[i * m + j] = ground_cost(mu.atom(i), nu.atom(j), p);
  }
  return c;
}

TransportResult product_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  Coupling plan{mu.size(), nu.size(), {}};
  double cost = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double mass = mu.weight(i) * nu.weight(j);
      plan.entries.push_back({i, j, mass});
      cost += mass * ground_cost(mu.atom(i), nu.atom(j), p);
    }
  }
  return finish(cost, p, std::move(plan), SolverKind::Simplex);
}

// Transportation simplex on an n x m instance. The basis is a spanning tree
// of the bipartite graph rows + cols with exactly n + m - 1 cells; zero-flow
// basic cells carry degeneracy.
class TransportationSimplex {
 public:
  TransportationSimplex(std::vector<double> supply, std::vector<double> demand,
                        std::vector<double> cost)
      : n_(supply.size()),
        m_(demand.size()),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        cost_(std::move(cost)),
        flow_(n_ * m_, 0.0),
        basic_(n_ * m_, false) {
    double cmax = 0.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    tolerance_ = 1e-11 * std::max(cmax, std::numeric_limits<double>::min());
  }

  std::size_t solve(std::size_t max_iterations) {
    northwest_corner();
    bool bland = false;
    std::size_t iter = 0;
    for (;; ++iter) {
      compute_potentials();
      const std::size_t entering = bland ? pick_bland() : pick_dantzig();
      if (entering == kNone) return iter;
      if (iter >= max_iterations) {
        throw Error(ErrorCode::SolverStalled,
                    "transportation simplex exceeded " + std::to_string(max_iterations) +
                        " pivots");
      }
      const double theta = pivot(entering);
      bland = theta < kDegenerateStep;
    }
  }

  double objective() const {
    double s = 0.0;
    for (std::size_t k : basis_) s += flow_[k] * cost_[k];
    return s;
  }

  Coupling plan() const {
    Coupling c{n_, m_, {}};
    std::vector<std::size_t> cells = basis_;
    std::sort(cells.begin(), cells.end());
    for (std::size_t k : cells) {
      if (flow_[k] > 0.0) c.entries.push_back({k / m_, k % m_, flow_[k]});
    }
    return c;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr double kDegenerateStep = 1e-14;

  void northwest_corner() {
    std::vector<double> a = supply_;
    std::vector<double> b = demand_;
    std::size_t i = 0;
    std::size_t j = 0;
    for (;;) {
      const std::size_t k = i * m_ + j;
      const double x = std::max(0.0, std::min(a[i], b[j]));
      flow_[k] = x;
      basic_[k] = true;
      basis_.push_back(k);
      a[i] -= x;
      b[j] -= x;
      if (i + 1 == n_ && j + 1 == m_) break;
      if (j + 1 == m_ || (i + 1 < n_ && a[i] <= b[j])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void build_adjacency() {
    adjacency_.assign(n_ + m_, {});
    for (std::size_t k : basis_) {
      adjacency_[k / m_].push_back(k);
      adjacency_[n_ + k % m_].push_back(k);
    }
  }

  std::size_t other_end(std::size_t node, std::size_t cell) const {
    return node < n_ ? n_ + cell % m_ : cell / m_;
  }

  void compute_potentials() {
    build_adjacency();
    row_pot_.assign(n_, 0.0);
    col_pot_.assign(m_, 0.0);
    std::vector<bool> seen(n_ + m_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t cell : adjacency_[node]) {
        const std::size_t next = other_end(node, cell);
        if (seen[next]) continue;
        seen[next] = true;
        if (next >= n_) {
          col_pot_[next - n_] = cost_[cell] - row_pot_[cell / m_];
        } else {
          row_pot_[next] = cost_[cell] - col_pot_[cell % m_];
        }
        stack.push_back(next);
      }
    }
  }

  double reduced_cost(std::size_t k) const {
    return cost_[k] - row_pot_[k / m_] - col_pot_[k % m_];
  }

  std::size_t pick_dantzig() const {
    std::size_t best = kNone;
    double best_rc = -tolerance_;
    for (std::size_t k = 0; k < n_ * m_; ++k) {
      if (basic_[k]) continue;
      const double rc = reduced_cost(k);
      if (rc < best_rc) {
        best_rc = rc;
        best = k;
      }
    }
    return best;
  }

  std::size_t pick_bland() const {
    for (std::size_t k = 0; k < n_ * m_; ++k) {
      if (!basic_[k] && reduced_cost(k) < -tolerance_) return k;
    }
    return kNone;
  }

  // Path of basis cells from row node `from` to column node `to` in the tree.
  std::vector<std::size_t> tree_path(std::size_t from, std::size_t to) const {
    std::vector<std::size_t> parent_cell(n_ + m_, kNone);
    std::vector<bool> seen(n_ + m_, false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node == to) break;
      for (std::size_t cell : adjacency_[node]) {
        const std::size_t next = other_end(node, cell);
        if (seen[next]) continue;
        seen[next] = true;
        parent_cell[next] = cell;
        stack.push_back(next);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t node = to; node != from;) {
      const std::size_t cell = parent_cell[node];
      if (cell == kNone) {
        throw Error(ErrorCode::NumericalInconsistency, "basis is not a spanning tree");
      }
      path.push_back(cell);
      node = other_end(node, cell);
    }
    return path;  // starts at the cell incident to `to`
  }

  double pivot(std::size_t entering) {
    const std::size_t row = entering / m_;
    const std::size_t col = n_ + entering % m_;
    const std::vector<std::size_t> path = tree_path(row, col);
    // Along the cycle entering(+), path[0](-), path[1](+), ...
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t q = 0; q < path.size(); q += 2) {
      const std::size_t k = path[q];
      if (flow_[k] < theta || (flow_[k] == theta && k < leaving)) {
        theta = flow_[k];
        leaving = k;
      }
    }
    for (std::size_t q = 0; q < path.size(); ++q) {
      const std::size_t k = path[q];
      if (q % 2 == 0) {
        flow_[k] = std::max(0.0, flow_[k] - theta);
      } else {
        flow_[k] += theta;
      }
    }
    flow_[leaving] = 0.0;
    flow_[entering] = theta;
    basic_[leaving] = false;
    basic_[entering] = true;
    std::replace(basis_.begin(), basis_.end(), leaving, entering);
    return theta;
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  std::vector<double> cost_;
  std::vector<double> flow_;
  std::vector<bool> basic_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> row_pot_;
  std::vector<double> col_pot_;
  double tolerance_ = 0.0;
};

// Flows of the basic solution supported on a spanning tree, by leaf peeling.
// Returns false when the tree solution is infeasible (negative flow).
bool tree_solution(std::size_t n, std::size_t m, const std::vector<std::size_t>& cells,
                   const std::vector<double>& a, const std::vector<double>& b,
                   std::vector<double>& flows) {
  std::vector<double> residual(n + m);
  std::copy(a.begin(), a.end(), residual.begin());
  std::copy(b.begin(), b.end(), residual.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<int> degree(n + m, 0);
  for (std::size_t k : cells) {
    ++degree[k / m];
    ++degree[n + k % m];
  }
  std::vector<bool> done(cells.size(), false);
  flows.assign(cells.size(), 0.0);
  for (std::size_t round = 0; round < cells.size(); ++round) {
    bool progressed = false;
    for (std::size_t e = 0; e < cells.size(); ++e) {
      if (done[e]) continue;
      const std::size_t r = cells[e] / m;
      const std::size_t c = n + cells[e] % m;
      std::size_t leaf;
      std::size_t other;
      if (degree[r] == 1) {
        leaf = r;
        other = c;
      } else if (degree[c] == 1) {
        leaf = c;
        other = r;
      } else {
        continue;
      }
      const double f = residual[leaf];
      if (f < -1e-12) return false;
      flows[e] = std::max(0.0, f);
      residual[leaf] = 0.0;
      residual[other] -= f;
      --degree[r];
      --degree[c];
      done[e] = true;
      progressed = true;
      break;
    }
    if (!progressed) return false;
  }
  return true;
}

bool is_uniform(const DiscreteMeasure& m) {
  const double w = 1.0 / static_cast<double>(m.size());
  return std::all_of(m.weights().begin(), m.weights().end(),
                     [&](double x) { return std::abs(x - w) <= 1e-12; });
}

TransportResult permutation_search(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double p) {
  const std::size_t n = mu.size();
  const std::vector<double> c = cost_matrix(mu, nu, p);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c[i * n + perm[i]];
    if (s < best) {
      best = s;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  Coupling plan{n, n, {}};
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) plan.entries.push_back({i, best_perm[i], w});
  return finish(best * w, p, std::move(plan), SolverKind::BruteForce);
}

TransportResult basis_enumeration(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  double p) {
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::size_t cells = n * m;
  const std::size_t k = n + m - 1;
  const std::vector<double> c = cost_matrix(mu, nu, p);

  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::size_t> uf(n + m);
  std::vector<double> flows;
  double best = std::numeric_limits<double>::infinity();
  Coupling best_plan{n, m, {}};

  auto find = [&](std::size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };

  for (;;) {
    std::iota(uf.begin(), uf.end(), 0);
    bool tree = true;
    for (std::size_t cell : pick) {
      const std::size_t r = find(cell / m);
      const std::size_t s = find(n + cell % m);
      if (r == s) {
        tree = false;
        break;
      }
      uf[r] = s;
    }
    if (tree && tree_solution(n, m, pick, mu.weights(), nu.weights(), flows)) {
      double s = 0.0;
      for (std::size_t e = 0; e < k; ++e) s += flows[e] * c[pick[e]];
      if (s < best) {
        best = s;
        best_plan.entries.clear();
        for (std::size_t e = 0; e < k; ++e) {
          if (flows[e] > 0.0) best_plan.entries.push_back({pick[e] / m, pick[e] % m, flows[e]});
        }
      }
    }
    // next k-combination of {0, ..., cells-1}
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == cells - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::NumericalInconsistency, "no feasible basis found");
  }
  return finish(best, p, std::move(best_plan), SolverKind::BruteForce);
}

}  // namespace

std::vector<double> Coupling::row_sums() const {
  std::vector<double> s(rows, 0.0);
  for (const auto& e : entries) s[e.row] += e.mass;
  return s;
}

std::vector<double> Coupling::col_sums() const {
  std::vector<double> s(cols, 0.0);
  for (const auto& e : entries) s[e.col] += e.mass;
  return s;
}

double Coupling::marginal_error(const DiscreteMeasure& source,
                                const DiscreteMeasure& target) const {
  if (source.size() != rows || target.size() != cols) {
    return std::numeric_limits<double>::infinity();
  }
  double err = 0.0;
  const auto rs = row_sums();
  const auto cs = col_sums();
  for (std::size_t i = 0; i < rows; ++i) err = std::max(err, std::abs(rs[i] - source.weight(i)));
  for (std::size_t j = 0; j < cols; ++j) err = std::max(err, std::abs(cs[j] - target.weight(j)));
  return err;
}

std::string_view to_string(SolverKind s) noexcept {
  switch (s) {
    case SolverKind::Simplex: return "simplex";
    case SolverKind::Quantile1D: return "quantile1d";
    case SolverKind::BruteForce: return "bruteforce";
  }
  return "unknown";
}

double ground_cost(const BasePoint& x, const BasePoint& y, double p) {
  const double d = distance(x, y);
  if (d < kZeroDistance) return 0.0;
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

TransportResult wasserstein_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const SimplexOptions& options) {
  check_inputs(mu, nu, p, "wasserstein_exact");
  if (mu.size() == 1 || nu.size() == 1) return product_coupling(mu, nu, p);

  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::size_t cap =
      options.max_iterations != 0 ? options.max_iterations : 10 * (n + m) * (n + m);
  TransportationSimplex simplex(mu.weights(), nu.weights(), cost_matrix(mu, nu, p));
  const std::size_t iterations = simplex.solve(cap);
  return finish(simplex.objective(), p, simplex.plan(), SolverKind::Simplex, iterations);
}

LinearTransport min_cost_transport(const std::vector<double>& supply,
                                   const std::vector<double>& demand, std::vector<double> cost,
                                   const SimplexOptions& options) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (n == 0 || m == 0) throw Error(ErrorCode::EmptyMeasure, "empty marginal");
  if (cost.size() != n * m) throw Error(ErrorCode::DimensionError, "cost matrix is not n x m");
  LinearTransport out;
  out.plan = Coupling{n, m, {}};
  if (n == 1 || m == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double mass = supply[i] * demand[j];
        out.plan.entries.push_back({i, j, mass});
        out.objective += mass * cost[i * m + j];
      }
    }
    return out;
  }
  const std::size_t cap =
      options.max_iterations != 0 ? options.max_iterations : 10 * (n + m) * (n + m);
  TransportationSimplex simplex(supply, demand, std::move(cost));
  out.iterations = simplex.solve(cap);
  out.objective = simplex.objective();
  out.plan = simplex.plan();
  return out;
}

double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  return wasserstein_exact(mu, nu, p).value;
}

TransportResult wasserstein_1d_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      double p) {
  check_inputs(mu, nu, p, "wasserstein_1d_oracle");
  if (mu.dim() != 1) throw Error(ErrorCode::DimensionError, "quantile oracle needs d = 1");

  auto order = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return m.atom(a)[0] < m.atom(b)[0]; });
    return idx;
  };
  const auto src = order(mu);
  const auto dst = order(nu);

  Coupling plan{mu.size(), nu.size(), {}};
  double cost = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = mu.weight(src[0]);
  double rb = nu.weight(dst[0]);
  while (i < src.size() && j < dst.size()) {
    const double mass = std::min(ra, rb);
    if (mass > 0.0) {
      plan.entries.push_back({src[i], dst[j], mass});
      cost += mass * ground_cost(mu.atom(src[i]), nu.atom(dst[j]), p);
    }
    ra -= mass;
    rb -= mass;
    // advance whichever side is exhausted; on a tie advance both
    const bool next_i = ra <= rb;
    const bool next_j = rb <= ra;
    if (next_i && ++i < src.size()) ra = mu.weight(src[i]);
    if (next_j && ++j < dst.size()) rb = nu.weight(dst[j]);
  }
  return finish(cost, p, std::move(plan), SolverKind::Quantile1D);
}

TransportResult brute_force_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double p) {
  check_inputs(mu, nu, p, "brute_force_oracle");
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  if (n == m && n <= 7 && is_uniform(mu) && is_uniform(nu)) return permutation_search(mu, nu, p);
  if (n + m <= 10) return basis_enumeration(mu, nu, p);
  throw Error(ErrorCode::InstanceTooLarge, "brute force limited to n = m <= 7 uniform or n + m <= 10");
}

}  // namespace wvlab
