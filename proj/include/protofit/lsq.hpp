#pragma once

#include "protofit/basis.hpp"
#include "protofit/schur.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <utility>

namespace protofit {

inline constexpr double kDefaultRankTol = 1e-10;

// Group of l signals sampled column-wise on a shared grid.
class SignalSet {
 public:
  SignalSet(Eigen::MatrixXd samples, TimeGrid grid);

  const Eigen::MatrixXd& samples() const { return samples_; }
  const TimeGrid& grid() const { return grid_; }
  int num_points() const { return static_cast<int>(samples_.rows()); }
  int num_signals() const { return static_cast<int>(samples_.cols()); }

 private:
  Eigen::MatrixXd samples_;
  TimeGrid grid_;
};

// Pointwise average of a group, together with the group size that produced
// it; carrying the weight makes incremental updates self-contained.
struct Centroid {
  Eigen::VectorXd values;
  int weight = 0;
};

struct Prototype {
  Eigen::VectorXd coefficients;
  ExponentSet basis;
};

enum class SolverMode { inverse, svd };

// Precomputed solver for B0^T B0 X = B0^T c, reusable across right-hand
// sides. Invertible Gram matrices get an explicit inverse (computed from a
// pivoted LU, with its reciprocal condition estimate retained); singular
// ones get the SVD with a numerical-rank cutoff. Immutable and cheap to
// copy; safe to share across threads.
class SolverHandle {
 public:
  SolverMode mode() const;
  const ExponentSet& basis() const;
  int grid_size() const;
  std::uint64_t gram_hash() const;
  double rcond() const;  // reciprocal condition estimate of the Gram matrix
  int rank() const;      // numerical rank used by the svd mode

  friend SolverHandle precompute_solver(const ExponentSet& basis, const TimeGrid& grid,
                                        double tol);
  friend Prototype solve_with_handle(const SolverHandle& h, const Centroid& c);

 private:
  SolverHandle() = default;

  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// FNV-1a fingerprint of the basis exponents and grid point bit patterns.
std::uint64_t gram_fingerprint(const ExponentSet& basis, const TimeGrid& grid);

Centroid centroid(const SignalSet& signals);

// S_new = (l * S_old + sum(added) - sum(removed)) / (l + l_a - l_r).
// `added` and `removed` are N x l_a / N x l_r sample blocks; either may
// have zero columns. The caller is responsible for only removing signals
// that were actually members.
Centroid update_centroid(const Centroid& old, const Eigen::MatrixXd& added,
                         const Eigen::MatrixXd& removed);

// A = B0^T B0 and b = B0^T c for the simplified (factor-l) normal system.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_normal_system(const ExponentSet& basis,
                                                                   const TimeGrid& grid,
                                                                   const Centroid& c);

SolverHandle precompute_solver(const ExponentSet& basis, const TimeGrid& grid,
                               double tol = kDefaultRankTol);

// inverse mode: X = (B0^T B0)^-1 b. svd mode: minimum-norm least-squares
// solution through the pseudo-inverse with the handle's rank cutoff.
Prototype solve_with_handle(const SolverHandle& h, const Centroid& c);

// centroid -> assemble -> precompute -> solve.
Prototype fit_prototype(const ExponentSet& basis, const SignalSet& signals);

// sum_j coefficients[j] * t^(m_j), evaluated with the same arithmetic as
// the design matrix entries.
double evaluate_prototype(const Prototype& p, double t);

// Sum over grid points and signals of squared residuals against the
// prototype curve.
double group_objective(const Prototype& p, const SignalSet& signals);

}  // namespace protofit
