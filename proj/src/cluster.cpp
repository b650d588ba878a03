#include "protofit/cluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace protofit {

namespace {

// Squared residual of signal column j against a prototype curve sampled on
// the grid. The loop order matches group_objective so that per-cluster sums
// reproduce it exactly.
double signal_distance(const Eigen::MatrixXd& samples, int j, const Eigen::VectorXd& curve) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double r = samples(i, j) - curve(i);
    acc += r * r;
  }
  return acc;
}

std::vector<Eigen::VectorXd> prototype_curves(const TimeGrid& grid,
                                              const std::vector<Prototype>& prototypes) {
  std::vector<Eigen::VectorXd> curves;
  curves.reserve(prototypes.size());
  for (const Prototype& p : prototypes) {
    Eigen::VectorXd curve(grid.size());
    for (int i = 0; i < grid.size(); ++i) curve(i) = evaluate_prototype(p, grid[i]);
    curves.push_back(std::move(curve));
  }
  return curves;
}

int nearest_cluster(const Eigen::MatrixXd& samples, int j,
                    const std::vector<Eigen::VectorXd>& curves) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const double d = signal_distance(samples, j, curves[c]);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

// Reseeds every empty cluster with the worst-fitting signal taken from a
// cluster that still has at least two members.
void repair_empty_clusters(std::vector<int>& assignments, const Eigen::MatrixXd& samples,
                           const std::vector<Eigen::VectorXd>& curves) {
  const int k = static_cast<int>(curves.size());
  const int l = static_cast<int>(assignments.size());
  std::vector<int> counts(k, 0);
  for (int a : assignments) ++counts[a];

  for (int c = 0; c < k; ++c) {
    while (counts[c] == 0) {
      int worst = -1;
      double worst_dist = -1.0;
      for (int j = 0; j < l; ++j) {
        if (counts[assignments[j]] < 2) continue;
        const double d = signal_distance(samples, j, curves[assignments[j]]);
        if (d > worst_dist) {
          worst_dist = d;
          worst = j;
        }
      }
      if (worst < 0) throw std::runtime_error("cannot repair empty cluster");
      --counts[assignments[worst]];
      assignments[worst] = c;
      ++counts[c];
    }
  }
}

std::vector<Centroid> batch_centroids(const SignalSet& signals,
                                      const std::vector<int>& assignments, int k) {
  const Eigen::MatrixXd& samples = signals.samples();
  std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(samples.rows()));
  std::vector<int> counts(k, 0);
  for (int j = 0; j < static_cast<int>(assignments.size()); ++j) {
    sums[assignments[j]] += samples.col(j);
    ++counts[assignments[j]];
  }
  std::vector<Centroid> out;
  out.reserve(k);
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) throw std::runtime_error("empty cluster has no centroid");
    out.push_back(Centroid{sums[c] / static_cast<double>(counts[c]), counts[c]});
  }
  return out;
}

}  // namespace

std::vector<int> assign_signals(const SignalSet& signals,
                                const std::vector<Prototype>& prototypes, int threads) {
  if (prototypes.empty()) throw std::invalid_argument("need at least one prototype");
  const auto curves = prototype_curves(signals.grid(), prototypes);
  const int l = signals.num_signals();
  std::vector<int> assignments(l);

  const int workers = std::max(1, std::min(threads, l));
  if (workers == 1) {
    for (int j = 0; j < l; ++j) assignments[j] = nearest_cluster(signals.samples(), j, curves);
    return assignments;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int j = w; j < l; j += workers)
        assignments[j] = nearest_cluster(signals.samples(), j, curves);
    });
  }
  for (auto& t : pool) t.join();
  return assignments;
}

double total_objective(const SignalSet& signals, const std::vector<int>& assignments,
                       const std::vector<Prototype>& prototypes) {
  const auto curves = prototype_curves(signals.grid(), prototypes);
  const int l = signals.num_signals();
  double total = 0.0;
  for (std::size_t c = 0; c < prototypes.size(); ++c) {
    double cluster_sum = 0.0;
    for (int j = 0; j < l; ++j)
      if (assignments[j] == static_cast<int>(c))
        cluster_sum += signal_distance(signals.samples(), j, curves[c]);
    total += cluster_sum;
  }
  return total;
}

ClusterState kmeans_curves(const SignalSet& signals, const ExponentSet& basis, int k,
                           const KMeansConfig& config) {
  const int l = signals.num_signals();
  if (k < 1) throw std::invalid_argument("cluster count must be positive");
  if (k > l) throw std::invalid_argument("cluster count exceeds signal count");
  if (config.max_iter < 1) throw std::invalid_argument("max_iter must be positive");

  // Grid and basis are shared, so one Gram check and one handle serve all
  // clusters across the whole run.
  const SolverHandle handle = precompute_solver(basis, signals.grid(), kDefaultRankTol);

  // Seeded selection of k distinct signals as initial centroids.
  std::vector<int> indices(l);
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 rng(config.seed);
  for (int c = 0; c < k; ++c) {
    std::uniform_int_distribution<int> pick(c, l - 1);
    std::swap(indices[c], indices[pick(rng)]);
  }

  std::vector<Prototype> prototypes;
  prototypes.reserve(k);
  for (int c = 0; c < k; ++c) {
    const Centroid seed{signals.samples().col(indices[c]), 1};
    prototypes.push_back(solve_with_handle(handle, seed));
  }

  std::vector<int> assignments = assign_signals(signals, prototypes, config.threads);
  repair_empty_clusters(assignments, signals.samples(),
                        prototype_curves(signals.grid(), prototypes));

  ClusterState state;
  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 1;; ++iter) {
    state.centroids = batch_centroids(signals, assignments, k);
    prototypes.clear();
    for (int c = 0; c < k; ++c) prototypes.push_back(solve_with_handle(handle, state.centroids[c]));

    state.objective = total_objective(signals, assignments, prototypes);
    state.objective_trace.push_back(state.objective);
    state.iterations = iter;

    if (iter >= config.max_iter) break;
    if (iter > 1 && prev_objective - state.objective < config.tol) break;
    prev_objective = state.objective;

    std::vector<int> next = assign_signals(signals, prototypes, config.threads);
    repair_empty_clusters(next, signals.samples(), prototype_curves(signals.grid(), prototypes));
    if (next == assignments) break;
    assignments = std::move(next);
  }

  state.assignments = std::move(assignments);
  state.prototypes = std::move(prototypes);
  return state;
}

ClusterState apply_membership_moves(const ClusterState& state, const SignalSet& signals,
                                    const std::vector<Move>& moves,
                                    const std::vector<SolverHandle>& handle_bank) {
  const int k = static_cast<int>(state.prototypes.size());
  const int l = signals.num_signals();
  if (static_cast<int>(handle_bank.size()) != k)
    throw std::invalid_argument("handle bank size must match cluster count");
  if (static_cast<int>(state.assignments.size()) != l)
    throw std::invalid_argument("state does not match signal set");
  if (moves.empty()) return state;

  // Validate the whole list (sequentially, so chained moves of one signal
  // are legal) before touching any numbers.
  std::vector<int> assignments = state.assignments;
  std::vector<int> weights(k);
  for (int c = 0; c < k; ++c) weights[c] = state.centroids[c].weight;
  std::vector<std::vector<int>> added(k), removed(k);

  for (std::size_t m = 0; m < moves.size(); ++m) {
    const Move& mv = moves[m];
    if (mv.signal < 0 || mv.signal >= l) throw std::invalid_argument("move references invalid signal index");
    if (mv.from < 0 || mv.from >= k || mv.to < 0 || mv.to >= k)
      throw std::invalid_argument("move references invalid cluster index");
    if (mv.from == mv.to) throw std::invalid_argument("move source and destination must differ");
    if (assignments[mv.signal] != mv.from)
      throw std::invalid_argument("move source does not match current assignment");
    assignments[mv.signal] = mv.to;
    removed[mv.from].push_back(mv.signal);
    added[mv.to].push_back(mv.signal);
    --weights[mv.from];
    ++weights[mv.to];
  }
  for (int c = 0; c < k; ++c)
    if (weights[c] < 1) throw std::invalid_argument("cluster emptied");

  ClusterState out = state;
  out.assignments = std::move(assignments);
  for (int c = 0; c < k; ++c) {
    if (added[c].empty() && removed[c].empty()) continue;
    Eigen::MatrixXd added_cols(signals.num_points(), added[c].size());
    for (std::size_t j = 0; j < added[c].size(); ++j) added_cols.col(j) = signals.samples().col(added[c][j]);
    Eigen::MatrixXd removed_cols(signals.num_points(), removed[c].size());
    for (std::size_t j = 0; j < removed[c].size(); ++j)
      removed_cols.col(j) = signals.samples().col(removed[c][j]);
    out.centroids[c] = update_centroid(state.centroids[c], added_cols, removed_cols);
    out.prototypes[c] = solve_with_handle(handle_bank[c], out.centroids[c]);
  }
  out.objective = total_objective(signals, out.assignments, out.prototypes);
  return out;
}

}  // namespace protofit
