#pragma once

#include "protofit/lsq.hpp"

#include <vector>

namespace protofit {

struct KMeansConfig {
  int max_iter = 100;
  unsigned seed = 0;
  double tol = 1e-9;
  int threads = 1;
};

// One membership change: signal `signal` leaves cluster `from` and joins
// cluster `to`. Cluster ids are 0-based.
struct Move {
  int signal = 0;
  int from = 0;
  int to = 0;
};

struct ClusterState {
  std::vector<int> assignments;       // signal -> 0-based cluster id
  std::vector<Prototype> prototypes;  // one per cluster
  std::vector<Centroid> centroids;    // one per cluster
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // objective after each iteration
};

// Nearest prototype per signal under the squared-residual distance on the
// grid; ties go to the lowest cluster index. `threads` > 1 splits the
// signals across workers (per-signal results are independent, so the
// outcome does not depend on the split).
std::vector<int> assign_signals(const SignalSet& signals,
                                const std::vector<Prototype>& prototypes, int threads = 1);

// Sum over clusters of the group objective of their member signals;
// the summation order is fixed (clusters ascending, members ascending).
double total_objective(const SignalSet& signals, const std::vector<int>& assignments,
                       const std::vector<Prototype>& prototypes);

// Lloyd iteration over curves: seeded random signals as initial centroids,
// then alternate assignment and per-cluster prototype fits until the
// assignments are stable, the objective improvement drops below tol, or
// max_iter. One Gram check and one solver handle serve every cluster since
// grid and basis are shared. Deterministic for a fixed seed. Clusters
// emptied during iteration are reseeded with the worst-fitting signal.
ClusterState kmeans_curves(const SignalSet& signals, const ExponentSet& basis, int k,
                           const KMeansConfig& config = {});

// Applies a batch of membership moves: affected clusters get their centroid
// updated incrementally and their prototype re-solved through the handle
// bank (no refactorization); untouched clusters are carried over unchanged.
// A move list that would empty a cluster is rejected before any state is
// touched ("cluster emptied").
ClusterState apply_membership_moves(const ClusterState& state, const SignalSet& signals,
                                    const std::vector<Move>& moves,
                                    const std::vector<SolverHandle>& handle_bank);

}  // namespace protofit
