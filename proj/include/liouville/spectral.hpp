#pragma once

#include "liouville/graph.hpp"
#include "liouville/transfer.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace liouville {

enum class SpectralMethod { dense, iterative };

std::string to_string(SpectralMethod method);

/// Two-sided spectral gap of a layer's walk operator (adjacency / 3).
struct SpectralReport {
  double gap = 0.0;                     ///< 1 - secondEigenvalueModulus
  double secondEigenvalueModulus = 0.0; ///< max |eigenvalue| off the constant vector
  SpectralMethod method = SpectralMethod::dense;
  double residual = 0.0;
  int iterations = 0;
};

struct SpectralOptions {
  std::int64_t denseLimit = 4096;
  double tolerance = 1e-8;
  int maxIterations = 100000;
};

/// Gap of the degree-3 walk operator on `numVertices` vertices with the given
/// edge multiset. Dense symmetric eigensolve up to `denseLimit` vertices;
/// above that, restarted Lanczos on the complement of the constant vector.
///
/// For the dense path `residual` is ||W1 - 1||_inf; for the iterative path it
/// is the larger Ritz residual of the two extreme eigenpairs.
SpectralReport walk_operator_gap(std::int64_t numVertices,
                                 std::span<const std::pair<std::int64_t, std::int64_t>> edges,
                                 const SpectralOptions& options = {});

/// Gap of a layer at level >= 1.
SpectralReport expander_gap(const ExpanderLayer& layer, const SpectralOptions& options = {});

/// Gap of level `level` of `g`: the certified value when present, else computed.
double level_gap(const LeveledGraph& g, int level);

struct MeanZeroNorm {
  double sigma = 0.0; ///< sup ||T f||_2 / ||f||_2 over mean-zero f, uniform-probability norms
  double bound = 1.0; ///< 1 - gap / 2
  bool withinUnit = true;
  bool pass = true;
};

/// Weighted operator norm of T restricted to mean-zero densities, compared
/// against the contraction bound 1 - layerGap/2.
MeanZeroNorm mean_zero_norm(const TransferOperator& t, double layerGap);

struct ReturnProbability {
  int t = 0;
  double probability = 0.0; ///< p_t(v, v)
  double root = 0.0;        ///< p_t(v, v)^(1/t)
};

/// Return probabilities at even times 2, 4, ..., <= tMax, by pushing a point mass
/// through the step kernel. Values on a finite truncation are diagnostics only.
std::vector<ReturnProbability> return_exponent(const LeveledGraph& g, VertexId v, int tMax);

} // namespace liouville
