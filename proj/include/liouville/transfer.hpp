#pragma once

#include "liouville/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace liouville {

/// Largest level whose transfer matrix is materialized (1024 x 2048).
inline constexpr int kMaterializationCap = 10;

/// First-hit probabilities p(x, y) from L_n to L_(n+1).
struct TransferOperator {
  int level = 0;
  Eigen::MatrixXd p; ///< 2^n rows (x in L_n), 2^(n+1) columns (y in L_(n+1))
  double solveResidual = 0.0;
};

/// A real function on L_n; means and norms are against the uniform probability 2^(-n).
struct LevelDensity {
  int level = 0;
  Eigen::VectorXd values;
  bool meanZero = false;
};

enum class MeasureMethod { exact, monteCarlo };

/// First-hit distribution on L_n of the walk started at `start`.
struct HarmonicMeasure {
  int level = 0;
  VertexId start;
  Eigen::VectorXd weights;
  MeasureMethod method = MeasureMethod::exact;
  std::uint64_t walks = 0;        ///< Monte Carlo only: accepted (uncensored) walks
  std::uint64_t censored = 0;     ///< Monte Carlo only
  Eigen::VectorXd standardErrors; ///< Monte Carlo only
};

/// The three first-step operators at level n, acting on densities.
struct StepOperators {
  int level = 0;
  Eigen::MatrixXd lift;         ///< L_n -> L_(n+1): (S1 f)(y) = f(parent(y))
  Eigen::MatrixXd layerAverage; ///< L_n -> L_n: mean over the three expander slots
  Eigen::MatrixXd childAverage; ///< L_n -> L_(n-1): (S3 f)(z) = (f(2z) + f(2z+1)) / 2
};

/// Solves the absorbed chain on B_(n+1) with L_(n+1) absorbing.
/// Requires n + 1 <= depth and n <= cap; otherwise ArgumentError (use
/// harmonic_measure_exact, which never materializes the matrix).
TransferOperator transfer_matrix(const LeveledGraph& g, int n, int cap = kMaterializationCap);

/// Matrix of f -> T f on densities: entry (y, x) = 2 p(x, y).
Eigen::MatrixXd density_matrix(const TransferOperator& t);

/// (T f)(y) = 2 sum_x f(x) p(x, y).
LevelDensity apply_transfer(const TransferOperator& t, const LevelDensity& f);

/// Harmonic measure by per-level propagation mu_(k+1) = mu_k T_k, each step one
/// absorbed-chain solve with the current measure as source.
HarmonicMeasure harmonic_measure_exact(const LeveledGraph& g, VertexId u, int n);

/// Same quantity from a single hitting-probability solve on B_(n-1); used as a
/// cross-check of the propagation route.
HarmonicMeasure harmonic_measure_direct(const LeveledGraph& g, VertexId u, int n);

/// f(x) = 2^n mu(x) - 1.
LevelDensity density_from_measure(const HarmonicMeasure& mu);

LevelDensity constant_density(int level, double value);
double level_mean(const LevelDensity& f);

enum class Norm { l1, l2, linf };

double level_norm(const LevelDensity& f, Norm p);

struct OperatorNorms {
  double norm1to1 = 0.0;     ///< max_x sum_y |p(x, y)|
  double normInfToInf = 0.0; ///< 2 max_y sum_x |p(x, y)|
  double colSumMax = 0.0;
  double colSumMin = 0.0;
  double rowSumMaxError = 0.0; ///< max_x |sum_y p(x, y) - 1|
  double colSumMaxError = 0.0; ///< max_y |sum_x p(x, y) - 1/2|
};

OperatorNorms operator_norms(const TransferOperator& t);

/// Requires 1 <= n < depth.
StepOperators step_operators(const LeveledGraph& g, int n);

/// Max-abs entry of T_n - (S1/3 + T_n S2/2 + T_n T_(n-1) S3/6) on densities.
double decomposition_residual(const LeveledGraph& g, int n, int cap = kMaterializationCap);

struct DecayRow {
  int n = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double sumAbsDiff = 0.0; ///< sum_w |mu_n^u(w) - mu_n^v(w)|
  double tv = 0.0;         ///< sumAbsDiff / 2
  std::optional<double> lambda;  ///< gap of the level-n layer
  std::optional<double> bound;   ///< 1 - lambda / 2
  std::optional<double> ratioL2; ///< ||f_(n+1)||_2 / ||f_n||_2
};

/// One row per n from max(u.level, v.level) to nMax; norms are of f_n^u.
std::vector<DecayRow> liouville_report(const LeveledGraph& g, VertexId u, VertexId v, int nMax);

/// Harmonic measures on every level from max(start levels) to nMax, for
/// several starts at once (one solve per level). result[k] is the matrix for
/// level firstLevel + k with one column per start.
struct LevelMeasures {
  int firstLevel = 0;
  std::vector<Eigen::MatrixXd> measures;
};
LevelMeasures propagate_harmonic(const LeveledGraph& g, const std::vector<VertexId>& starts,
                                 int nMax);

} // namespace liouville
