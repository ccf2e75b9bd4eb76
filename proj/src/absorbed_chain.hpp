#pragma once

#include "liouville/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>

namespace liouville::detail {

struct SolveOptions {
  /// Largest transient state space handled by sparse LU; sweeps above.
  std::int64_t directLimit = 4097;
  double tolerance = 1e-12;
  std::int64_t maxSweeps = 1000000;
  double damping = 1.0;
  /// Acceptable residual for the direct path.
  double directTolerance = 1e-10;
};

/// The walk on B_(L-1) killed on first arrival at L_L.
///
/// Transient states are the flat ids [0, 2^L - 1); absorbing states are L_L in
/// index order. Both blocks are contiguous in flat order.
class AbsorbedChain {
public:
  AbsorbedChain(const LeveledGraph& g, int absorbLevel, SolveOptions options = {});

  std::int64_t transient_count() const { return transientCount_; }
  std::int64_t absorbing_count() const { return absorbingCount_; }

  /// H(x, y) = P_x(first arrival in L_L is at y), for every transient x.
  Eigen::MatrixXd hitting_probabilities();

  /// First-arrival distributions on L_L for each column of `sources`, a
  /// (transient_count x k) matrix of starting measures.
  Eigen::MatrixXd propagate(const Eigen::MatrixXd& sources);

  /// Max-abs residual of the most recent solve.
  double residual() const { return residual_; }
  bool direct() const { return transientCount_ <= options_.directLimit; }

private:
  using Sparse = Eigen::SparseMatrix<double>;

  Eigen::MatrixXd solve(const Sparse& a, const Sparse& q, const Eigen::MatrixXd& rhs);
  Eigen::MatrixXd sweep(const Sparse& q, const Eigen::MatrixXd& rhs);

  SolveOptions options_;
  std::int64_t transientCount_ = 0;
  std::int64_t absorbingCount_ = 0;
  int absorbLevel_ = 0;
  Sparse interior_; ///< Q: transient -> transient
  Sparse exit_;     ///< R: transient -> absorbing
  double residual_ = 0.0;
};

} // namespace liouville::detail
