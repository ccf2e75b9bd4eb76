#include "liouville/transfer.hpp"

#include "absorbed_chain.hpp"
#include "liouville/errors.hpp"
#include "liouville/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liouville {

namespace {

void require_vertex(const LeveledGraph& g, VertexId v) {
  if (!g.contains(v))
    throw ArgumentError("vertex " + to_string(v) + " not in graph of depth " +
                        std::to_string(g.depth()));
}

void require_target_level(const LeveledGraph& g, VertexId u, int n) {
  require_vertex(g, u);
  if (n < u.level || n > g.depth())
    throw ArgumentError("target level " + std::to_string(n) + " must lie in [" +
                        std::to_string(u.level) + ", " + std::to_string(g.depth()) + "]");
}

Eigen::VectorXd point_mass(VertexId u) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(level_size(u.level));
  mass(u.index) = 1.0;
  return mass;
}

HarmonicMeasure exact_measure(VertexId u, int n, Eigen::VectorXd weights) {
  HarmonicMeasure mu;
  mu.level = n;
  mu.start = u;
  mu.weights = std::move(weights);
  mu.method = MeasureMethod::exact;
  return mu;
}

} // namespace

TransferOperator transfer_matrix(const LeveledGraph& g, int n, int cap) {
  if (n < 0 || n + 1 > g.depth())
    throw ArgumentError("transfer matrix needs 0 <= n and n + 1 <= depth (n=" + std::to_string(n) +
                        ", depth=" + std::to_string(g.depth()) + ")");
  if (n > cap)
    throw ArgumentError("level " + std::to_string(n) + " exceeds the materialization cap " +
                        std::to_string(cap) +
                        "; use harmonic_measure_exact to propagate measures instead");
  detail::AbsorbedChain chain(g, n + 1);
  const Eigen::MatrixXd hits = chain.hitting_probabilities();
  TransferOperator t;
  t.level = n;
  t.p = hits.bottomRows(level_size(n));
  t.solveResidual = chain.residual();
  return t;
}

Eigen::MatrixXd density_matrix(const TransferOperator& t) { return 2.0 * t.p.transpose(); }

LevelDensity apply_transfer(const TransferOperator& t, const LevelDensity& f) {
  if (f.level != t.level || f.values.size() != t.p.rows())
    throw ArgumentError("density on level " + std::to_string(f.level) +
                        " does not match transfer operator from level " +
                        std::to_string(t.level));
  LevelDensity out;
  out.level = t.level + 1;
  out.values = 2.0 * (t.p.transpose() * f.values);
  out.meanZero = f.meanZero;
  return out;
}

LevelMeasures propagate_harmonic(const LeveledGraph& g, const std::vector<VertexId>& starts,
                                 int nMax) {
  if (starts.empty())
    throw ArgumentError("propagate_harmonic needs at least one start");
  int lowest = starts.front().level;
  int highest = lowest;
  for (const auto& s : starts) {
    require_target_level(g, s, nMax);
    lowest = std::min(lowest, s.level);
    highest = std::max(highest, s.level);
  }
  const auto columns = static_cast<Eigen::Index>(starts.size());

  LevelMeasures out;
  out.firstLevel = highest;
  Eigen::MatrixXd current = Eigen::MatrixXd::Zero(level_size(lowest), columns);
  for (Eigen::Index k = 0; k < columns; ++k)
    if (starts[k].level == lowest)
      current(starts[k].index, k) = 1.0;

  for (int level = lowest;; ++level) {
    if (level >= highest)
      out.measures.push_back(current);
    if (level == nMax)
      break;
    detail::AbsorbedChain chain(g, level + 1);
    Eigen::MatrixXd sources = Eigen::MatrixXd::Zero(chain.transient_count(), columns);
    sources.bottomRows(level_size(level)) = current;
    current = chain.propagate(sources);
    for (Eigen::Index k = 0; k < columns; ++k)
      if (starts[k].level == level + 1)
        current(starts[k].index, k) = 1.0;
  }
  return out;
}

HarmonicMeasure harmonic_measure_exact(const LeveledGraph& g, VertexId u, int n) {
  require_target_level(g, u, n);
  auto levels = propagate_harmonic(g, {u}, n);
  return exact_measure(u, n, levels.measures.back().col(0));
}

HarmonicMeasure harmonic_measure_direct(const LeveledGraph& g, VertexId u, int n) {
  require_target_level(g, u, n);
  if (n == u.level)
    return exact_measure(u, n, point_mass(u));
  if (n > kMaterializationCap + 1)
    throw ArgumentError("direct hitting solve limited to n <= " +
                        std::to_string(kMaterializationCap + 1));
  detail::AbsorbedChain chain(g, n);
  const Eigen::MatrixXd hits = chain.hitting_probabilities();
  return exact_measure(u, n, hits.row(u.flat()).transpose());
}

LevelDensity density_from_measure(const HarmonicMeasure& mu) {
  LevelDensity f;
  f.level = mu.level;
  f.values = std::ldexp(1.0, mu.level) * mu.weights.array() - 1.0;
  f.meanZero = true;
  return f;
}

LevelDensity constant_density(int level, double value) {
  return {level, Eigen::VectorXd::Constant(level_size(level), value), value == 0.0};
}

double level_mean(const LevelDensity& f) { return f.values.mean(); }

double level_norm(const LevelDensity& f, Norm p) {
  if (f.values.size() == 0)
    return 0.0;
  switch (p) {
  case Norm::l1:
    return f.values.cwiseAbs().mean();
  case Norm::l2:
    return std::sqrt(f.values.squaredNorm() / static_cast<double>(f.values.size()));
  case Norm::linf:
    return f.values.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

OperatorNorms operator_norms(const TransferOperator& t) {
  const Eigen::VectorXd rows = t.p.rowwise().sum();
  const Eigen::VectorXd cols = t.p.colwise().sum().transpose();
  OperatorNorms norms;
  // Uniform probabilities on both levels: the L1 norm of a kernel operator is
  // the largest weighted row mass, and the weights cancel against the factor 2.
  norms.norm1to1 = t.p.cwiseAbs().rowwise().sum().maxCoeff();
  norms.normInfToInf = 2.0 * t.p.cwiseAbs().colwise().sum().maxCoeff();
  norms.colSumMax = cols.maxCoeff();
  norms.colSumMin = cols.minCoeff();
  norms.rowSumMaxError = (rows.array() - 1.0).abs().maxCoeff();
  norms.colSumMaxError = (cols.array() - 0.5).abs().maxCoeff();
  return norms;
}

StepOperators step_operators(const LeveledGraph& g, int n) {
  if (g.variant() != GraphVariant::standard)
    throw ArgumentError("step operators need expander layers (standard variant)");
  if (n < 1 || n >= g.depth())
    throw ArgumentError("step operators need 1 <= n < depth (n=" + std::to_string(n) + ")");
  const std::int64_t m = level_size(n);
  StepOperators s;
  s.level = n;
  s.lift = Eigen::MatrixXd::Zero(2 * m, m);
  for (std::int64_t y = 0; y < 2 * m; ++y)
    s.lift(y, y >> 1) = 1.0;
  s.layerAverage = Eigen::MatrixXd::Zero(m, m);
  const auto nbrs = g.layer(n).neighbours();
  for (std::int64_t x = 0; x < m; ++x)
    for (std::int64_t j : nbrs[static_cast<std::size_t>(x)])
      s.layerAverage(x, j) += 1.0 / 3.0;
  s.childAverage = Eigen::MatrixXd::Zero(m / 2, m);
  for (std::int64_t z = 0; z < m / 2; ++z) {
    s.childAverage(z, 2 * z) = 0.5;
    s.childAverage(z, 2 * z + 1) = 0.5;
  }
  return s;
}

double decomposition_residual(const LeveledGraph& g, int n, int cap) {
  if (n < 2)
    throw ArgumentError("decomposition residual is defined for n >= 2 (n=" + std::to_string(n) +
                        ")");
  const Eigen::MatrixXd tn = density_matrix(transfer_matrix(g, n, cap));
  const Eigen::MatrixXd tprev = density_matrix(transfer_matrix(g, n - 1, cap));
  const StepOperators s = step_operators(g, n);
  const Eigen::MatrixXd firstStep = s.lift / 3.0 + tn * s.layerAverage / 2.0 +
                                    tn * (tprev * s.childAverage) / 6.0;
  return (tn - firstStep).cwiseAbs().maxCoeff();
}

std::vector<DecayRow> liouville_report(const LeveledGraph& g, VertexId u, VertexId v, int nMax) {
  const LevelMeasures levels = propagate_harmonic(g, {u, v}, nMax);
  std::vector<DecayRow> rows;
  rows.reserve(levels.measures.size());
  for (std::size_t k = 0; k < levels.measures.size(); ++k) {
    const int n = levels.firstLevel + static_cast<int>(k);
    const Eigen::MatrixXd& mu = levels.measures[k];
    const LevelDensity f = density_from_measure(exact_measure(u, n, mu.col(0)));
    DecayRow row;
    row.n = n;
    row.l1 = level_norm(f, Norm::l1);
    row.l2 = level_norm(f, Norm::l2);
    row.linf = level_norm(f, Norm::linf);
    row.sumAbsDiff = (mu.col(0) - mu.col(1)).cwiseAbs().sum();
    row.tv = row.sumAbsDiff / 2.0;
    if (g.variant() == GraphVariant::standard && n >= 1) {
      row.lambda = level_gap(g, n);
      row.bound = 1.0 - *row.lambda / 2.0;
    }
    rows.push_back(row);
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k)
    if (rows[k].l2 > 0.0)
      rows[k].ratioL2 = rows[k + 1].l2 / rows[k].l2;
  return rows;
}

} // namespace liouville
