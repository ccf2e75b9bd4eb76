#include "liouville/spectral.hpp"

#include "liouville/errors.hpp"
#include "liouville/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>

namespace liouville {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

Sparse walk_operator(std::int64_t m, std::span<const std::pair<std::int64_t, std::int64_t>> edges) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * edges.size());
  for (const auto& [i, j] : edges) {
    entries.emplace_back(i, j, 1.0 / 3.0);
    entries.emplace_back(j, i, 1.0 / 3.0);
  }
  Sparse w(m, m);
  w.setFromTriplets(entries.begin(), entries.end());
  return w;
}

struct Ritz {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

void project_out_constant(Eigen::VectorXd& x) { x.array() -= x.mean(); }

// Restarted Lanczos with full reorthogonalization, restricted to the
// orthogonal complement of the constant vector. Returns the largest
// (or smallest) Ritz value of the deflated operator.
Ritz lanczos_extreme(const Sparse& w, bool largest, const SpectralOptions& options,
                     std::uint64_t seed) {
  const Eigen::Index m = w.rows();
  const Eigen::Index krylov = std::min<Eigen::Index>(m - 1, 300);
  Xoshiro256 rng(seed);
  Eigen::VectorXd start(m);
  for (Eigen::Index i = 0; i < m; ++i)
    start(i) = rng.uniform() - 0.5;

  Ritz best;
  double previous = std::nan("");
  while (best.iterations < options.maxIterations) {
    project_out_constant(start);
    Eigen::MatrixXd basis(m, krylov + 1);
    basis.col(0) = start.normalized();
    Eigen::VectorXd alpha(krylov);
    Eigen::VectorXd beta(krylov);
    Eigen::Index steps = 0;
    for (; steps < krylov; ++steps) {
      Eigen::VectorXd next = w * basis.col(steps);
      alpha(steps) = basis.col(steps).dot(next);
      project_out_constant(next);
      for (int pass = 0; pass < 2; ++pass)
        next -= basis.leftCols(steps + 1) * (basis.leftCols(steps + 1).transpose() * next);
      beta(steps) = next.norm();
      ++best.iterations;
      if (beta(steps) < 1e-14) {
        ++steps;
        break;
      }
      basis.col(steps + 1) = next / beta(steps);
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index k = 0; k < steps; ++k) {
      tri(k, k) = alpha(k);
      if (k + 1 < steps)
        tri(k, k + 1) = tri(k + 1, k) = beta(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::Index pick = largest ? steps - 1 : 0;
    best.value = es.eigenvalues()(pick);
    best.residual = std::abs(beta(steps - 1) * es.eigenvectors()(steps - 1, pick));
    double spacing = 1.0;
    if (steps > 1) {
      const Eigen::Index neighbour = largest ? steps - 2 : 1;
      spacing = std::max(std::abs(best.value - es.eigenvalues()(neighbour)), 1e-16);
    }
    const bool settled = std::abs(best.value - previous) <= options.tolerance;
    if (best.residual <= options.tolerance ||
        (settled && best.residual * best.residual / spacing <= options.tolerance))
      return best;
    previous = best.value;
    start = basis.leftCols(steps) * es.eigenvectors().col(pick);
  }
  throw NumericError("Lanczos did not converge in " + std::to_string(options.maxIterations) +
                         " iterations; residual " + std::to_string(best.residual),
                     best.residual);
}

} // namespace

std::string to_string(SpectralMethod method) {
  return method == SpectralMethod::dense ? "dense" : "iterative";
}

SpectralReport walk_operator_gap(std::int64_t numVertices,
                                 std::span<const std::pair<std::int64_t, std::int64_t>> edges,
                                 const SpectralOptions& options) {
  if (numVertices < 2)
    throw ArgumentError("spectral gap needs at least two vertices");
  const Sparse w = walk_operator(numVertices, edges);
  SpectralReport report;

  if (numVertices <= options.denseLimit) {
    const Eigen::MatrixXd dense(w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericError("dense eigensolve failed", 1.0);
    const auto& ev = es.eigenvalues();
    // Ascending order; the top eigenvalue belongs to the constant vector.
    report.secondEigenvalueModulus = std::max(std::abs(ev(0)), std::abs(ev(numVertices - 2)));
    report.method = SpectralMethod::dense;
    const Eigen::VectorXd image = dense * Eigen::VectorXd::Ones(numVertices);
    report.residual = (image.array() - 1.0).abs().maxCoeff();
    report.iterations = 0;
  } else {
    const Ritz top = lanczos_extreme(w, true, options, 0x7a11a5ULL);
    const Ritz bottom = lanczos_extreme(w, false, options, 0xb0770fULL);
    report.secondEigenvalueModulus = std::max(std::abs(top.value), std::abs(bottom.value));
    report.method = SpectralMethod::iterative;
    report.residual = std::max(top.residual, bottom.residual);
    report.iterations = top.iterations + bottom.iterations;
  }
  report.secondEigenvalueModulus = std::min(report.secondEigenvalueModulus, 1.0);
  report.gap = 1.0 - report.secondEigenvalueModulus;
  return report;
}

SpectralReport expander_gap(const ExpanderLayer& layer, const SpectralOptions& options) {
  if (layer.level < 1)
    throw ArgumentError("expander gap is defined for layers at level >= 1");
  return walk_operator_gap(layer.num_vertices(), layer.edges, options);
}

double level_gap(const LeveledGraph& g, int level) {
  const ExpanderLayer& layer = g.layer(level);
  if (layer.certifiedGap)
    return *layer.certifiedGap;
  return expander_gap(layer).gap;
}

MeanZeroNorm mean_zero_norm(const TransferOperator& t, double layerGap) {
  const Eigen::Index m = t.p.rows();
  MeanZeroNorm out;
  out.bound = 1.0 - layerGap / 2.0;
  if (m > 1) {
    // Uniform-probability norms: ||Tf||^2 / ||f||^2 = |M f|^2 / (2 |f|^2).
    const Eigen::MatrixXd projector =
        Eigen::MatrixXd::Identity(m, m) - Eigen::MatrixXd::Constant(m, m, 1.0 / m);
    const Eigen::MatrixXd restricted = density_matrix(t) * projector;
    const Eigen::MatrixXd gram = restricted.transpose() * restricted;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericError("mean-zero norm eigensolve failed", 1.0);
    out.sigma = std::sqrt(std::max(es.eigenvalues()(m - 1), 0.0) / 2.0);
  }
  out.withinUnit = out.sigma <= 1.0 + 1e-9;
  out.pass = out.withinUnit && out.sigma <= out.bound + 1e-6;
  return out;
}

std::vector<ReturnProbability> return_exponent(const LeveledGraph& g, VertexId v, int tMax) {
  if (!g.contains(v))
    throw ArgumentError("vertex " + to_string(v) + " not in graph");
  if (tMax < 2)
    throw ArgumentError("tMax must be at least 2");
  const std::int64_t count = g.vertex_count();
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd next(count);
  mass(v.flat()) = 1.0;
  std::vector<ReturnProbability> out;
  for (int t = 1; t <= tMax; ++t) {
    next.setZero();
    for (std::int64_t x = 0; x < count; ++x) {
      if (mass(x) == 0.0)
        continue;
      const auto slots = g.slots(x);
      const double share = mass(x) / static_cast<double>(slots.size());
      for (std::int32_t target : slots)
        next(target) += share;
    }
    mass.swap(next);
    if (t % 2 == 0) {
      const double p = mass(v.flat());
      out.push_back({t, p, std::pow(p, 1.0 / t)});
    }
  }
  return out;
}

} // namespace liouville
