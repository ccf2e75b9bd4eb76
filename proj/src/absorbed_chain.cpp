#include "absorbed_chain.hpp"

#include "liouville/errors.hpp"

#include <Eigen/SparseLU>

#include <string>
#include <vector>

namespace liouville::detail {

AbsorbedChain::AbsorbedChain(const LeveledGraph& g, int absorbLevel, SolveOptions options)
    : options_(options), absorbLevel_(absorbLevel) {
  if (absorbLevel < 1 || absorbLevel > g.depth())
    throw ArgumentError("absorbing level " + std::to_string(absorbLevel) +
                        " must lie in [1, depth=" + std::to_string(g.depth()) + "]");
  transientCount_ = ball_size(absorbLevel - 1);
  absorbingCount_ = level_size(absorbLevel);

  std::vector<Eigen::Triplet<double>> inner;
  std::vector<Eigen::Triplet<double>> outer;
  inner.reserve(static_cast<std::size_t>(transientCount_) * 6);
  for (std::int64_t x = 0; x < transientCount_; ++x) {
    const auto slots = g.slots(x);
    const double w = 1.0 / static_cast<double>(slots.size());
    for (std::int32_t target : slots) {
      if (target < transientCount_)
        inner.emplace_back(x, target, w);
      else
        outer.emplace_back(x, target - transientCount_, w);
    }
  }
  interior_.resize(transientCount_, transientCount_);
  interior_.setFromTriplets(inner.begin(), inner.end());
  exit_.resize(transientCount_, absorbingCount_);
  exit_.setFromTriplets(outer.begin(), outer.end());
}

Eigen::MatrixXd AbsorbedChain::hitting_probabilities() {
  Sparse identity(transientCount_, transientCount_);
  identity.setIdentity();
  const Sparse a = identity - interior_;
  return solve(a, interior_, Eigen::MatrixXd(exit_));
}

Eigen::MatrixXd AbsorbedChain::propagate(const Eigen::MatrixXd& sources) {
  if (sources.rows() != transientCount_)
    throw ArgumentError("source measure has " + std::to_string(sources.rows()) +
                        " entries, expected " + std::to_string(transientCount_));
  // Green's measure g solves g = s + Q^T g; first arrivals are R^T g.
  const Sparse qt = interior_.transpose();
  Sparse identity(transientCount_, transientCount_);
  identity.setIdentity();
  const Sparse at = identity - qt;
  const Eigen::MatrixXd green = solve(at, qt, sources);
  return exit_.transpose() * green;
}

Eigen::MatrixXd AbsorbedChain::solve(const Sparse& a, const Sparse& q,
                                     const Eigen::MatrixXd& rhs) {
  if (!direct())
    return sweep(q, rhs);

  Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw NumericError("sparse LU failed on absorbed chain for level " +
                           std::to_string(absorbLevel_) + ": " + lu.lastErrorMessage(),
                       1.0);
  Eigen::MatrixXd x = lu.solve(rhs);
  residual_ = rhs.size() == 0 ? 0.0 : (a * x - rhs).cwiseAbs().maxCoeff();
  if (!(residual_ <= options_.directTolerance))
    throw NumericError("direct solve residual " + std::to_string(residual_) +
                           " above tolerance at level " + std::to_string(absorbLevel_),
                       residual_);
  return x;
}

// Damped fixed-point sweeps x <- (1 - w) x + w (b + Q x). Convergent because
// the killed chain's interior operator has spectral radius below one.
Eigen::MatrixXd AbsorbedChain::sweep(const Sparse& q, const Eigen::MatrixXd& rhs) {
  Eigen::MatrixXd x = rhs;
  const double w = options_.damping;
  for (std::int64_t it = 0; it < options_.maxSweeps; ++it) {
    Eigen::MatrixXd update = rhs + q * x;
    residual_ = (update - x).cwiseAbs().maxCoeff();
    if (residual_ <= options_.tolerance)
      return update;
    x = (1.0 - w) * x + w * update;
  }
  throw NumericError("fixed-point sweeps did not converge at level " +
                         std::to_string(absorbLevel_) + " after " +
                         std::to_string(options_.maxSweeps) + " sweeps; residual " +
                         std::to_string(residual_),
                     residual_);
}

} // namespace liouville::detail
