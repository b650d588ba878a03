#include "protofit/lsq.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <bit>
#include <stdexcept>

namespace protofit {

SignalSet::SignalSet(Eigen::MatrixXd samples, TimeGrid grid)
    : samples_(std::move(samples)), grid_(std::move(grid)) {
  if (samples_.rows() != grid_.size())
    throw std::invalid_argument("signal rows must match grid length");
  if (samples_.cols() < 1) throw std::invalid_argument("signal set must contain a signal");
}

std::uint64_t gram_fingerprint(const ExponentSet& basis, const TimeGrid& grid) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(basis.size()));
  for (int e : basis.exponents()) mix(static_cast<std::uint64_t>(e));
  mix(static_cast<std::uint64_t>(grid.size()));
  for (double t : grid.points()) mix(std::bit_cast<std::uint64_t>(t));
  return h;
}

Centroid centroid(const SignalSet& signals) {
  return Centroid{signals.samples().rowwise().mean(), signals.num_signals()};
}

Centroid update_centroid(const Centroid& old, const Eigen::MatrixXd& added,
                         const Eigen::MatrixXd& removed) {
  const Eigen::Index n = old.values.size();
  if (added.cols() > 0 && added.rows() != n)
    throw std::invalid_argument("added signals must match centroid length");
  if (removed.cols() > 0 && removed.rows() != n)
    throw std::invalid_argument("removed signals must match centroid length");

  const int new_weight =
      old.weight + static_cast<int>(added.cols()) - static_cast<int>(removed.cols());
  if (new_weight < 1) throw std::invalid_argument("empty group");

  Eigen::VectorXd acc = static_cast<double>(old.weight) * old.values;
  for (Eigen::Index j = 0; j < added.cols(); ++j) acc += added.col(j);
  for (Eigen::Index j = 0; j < removed.cols(); ++j) acc -= removed.col(j);
  return Centroid{acc / static_cast<double>(new_weight), new_weight};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_normal_system(const ExponentSet& basis,
                                                                   const TimeGrid& grid,
                                                                   const Centroid& c) {
  if (c.values.size() != grid.size())
    throw std::invalid_argument("centroid length must match grid length");
  const Eigen::MatrixXd b0 = design_matrix(basis, grid).values;
  return {b0.transpose() * b0, b0.transpose() * c.values};
}

struct SolverHandle::Impl {
  SolverMode mode;
  ExponentSet basis;
  int grid_size;
  std::uint64_t gram_hash;
  Eigen::MatrixXd design;  // B0, needed to turn a centroid into a right-hand side

  // inverse mode
  Eigen::MatrixXd gram_inverse;
  double rcond = 0.0;

  // svd mode
  Eigen::MatrixXd svd_u;
  Eigen::MatrixXd svd_v;
  Eigen::VectorXd singular_values;
  int rank = 0;

  explicit Impl(ExponentSet b) : mode(SolverMode::inverse), basis(std::move(b)), grid_size(0), gram_hash(0) {}
};

SolverMode SolverHandle::mode() const { return impl_->mode; }
const ExponentSet& SolverHandle::basis() const { return impl_->basis; }
int SolverHandle::grid_size() const { return impl_->grid_size; }
std::uint64_t SolverHandle::gram_hash() const { return impl_->gram_hash; }
double SolverHandle::rcond() const { return impl_->rcond; }
int SolverHandle::rank() const { return impl_->rank; }

SolverHandle precompute_solver(const ExponentSet& basis, const TimeGrid& grid, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  auto impl = std::make_shared<SolverHandle::Impl>(basis);
  impl->grid_size = grid.size();
  impl->gram_hash = gram_fingerprint(basis, grid);
  impl->design = design_matrix(basis, grid).values;
  const Eigen::MatrixXd gram = impl->design.transpose() * impl->design;

  const InvertibilityReport report = is_gram_invertible(basis, grid, tol);
  if (report.invertible) {
    impl->mode = SolverMode::inverse;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
    impl->gram_inverse = lu.inverse();
    impl->rcond = lu.rcond();
    impl->rank = basis.size();
  } else {
    impl->mode = SolverMode::svd;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
    impl->svd_u = svd.matrixU();
    impl->svd_v = svd.matrixV();
    impl->singular_values = svd.singularValues();
    const double cutoff = tol * impl->singular_values(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < impl->singular_values.size(); ++i)
      if (impl->singular_values(i) > cutoff) ++rank;
    impl->rank = rank;
    impl->rcond = impl->singular_values(0) > 0.0
                      ? impl->singular_values(impl->singular_values.size() - 1) /
                            impl->singular_values(0)
                      : 0.0;
  }

  SolverHandle handle;
  handle.impl_ = std::move(impl);
  return handle;
}

Prototype solve_with_handle(const SolverHandle& h, const Centroid& c) {
  const auto& impl = *h.impl_;
  if (c.values.size() != impl.grid_size) throw std::invalid_argument("handle/grid mismatch");

  const Eigen::VectorXd b = impl.design.transpose() * c.values;
  if (impl.mode == SolverMode::inverse)
    return Prototype{impl.gram_inverse * b, impl.basis};

  Eigen::VectorXd projected = impl.svd_u.transpose() * b;
  for (Eigen::Index i = 0; i < projected.size(); ++i)
    projected(i) = i < impl.rank ? projected(i) / impl.singular_values(i) : 0.0;
  return Prototype{impl.svd_v * projected, impl.basis};
}

Prototype fit_prototype(const ExponentSet& basis, const SignalSet& signals) {
  const SolverHandle handle = precompute_solver(basis, signals.grid());
  return solve_with_handle(handle, centroid(signals));
}

double evaluate_prototype(const Prototype& p, double t) {
  double acc = 0.0;
  for (int j = 0; j < p.basis.size(); ++j) acc += p.coefficients(j) * pow_int(t, p.basis[j]);
  return acc;
}

double group_objective(const Prototype& p, const SignalSet& signals) {
  const int n = signals.num_points();
  const int l = signals.num_signals();
  Eigen::VectorXd curve(n);
  for (int i = 0; i < n; ++i) curve(i) = evaluate_prototype(p, signals.grid()[i]);

  double acc = 0.0;
  for (int j = 0; j < l; ++j)
    for (int i = 0; i < n; ++i) {
      const double r = signals.samples()(i, j) - curve(i);
      acc += r * r;
    }
  return acc;
}

}  // namespace protofit
