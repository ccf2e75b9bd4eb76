#pragma once

#include "liouville/graph.hpp"
#include "liouville/rng.hpp"
#include "liouville/transfer.hpp"

#include <cstdint>
#include <vector>

namespace liouville {

/// Results depend on (graph, start, target, masterSeed, walks, maxSteps) only;
/// `workers` changes speed, never output.
struct WalkConfig {
  std::uint64_t masterSeed = 0;
  std::uint64_t walks = 100000;
  std::uint64_t maxSteps = 10000000;
  int workers = 1;
};

struct WalkOutcome {
  VertexId absorbedAt;
  std::uint64_t steps = 0;
  bool censored = false; ///< maxSteps reached before absorption
};

/// Runs the slot walk from `start` until it first stands on level `absorbLevel`.
WalkOutcome run_absorbed_walk(const LeveledGraph& g, VertexId start, int absorbLevel,
                              Xoshiro256& rng, std::uint64_t maxSteps = 10000000);

/// Empirical first-hit distribution on L_n with per-vertex binomial standard errors.
/// Walk k uses stream walk_stream(masterSeed, k); censored walks are dropped and counted.
HarmonicMeasure mc_harmonic_measure(const LeveledGraph& g, VertexId u, int n,
                                    const WalkConfig& config);

/// Law of V, the number of times t >= 1 at which a walk from y in L_(n+1) is in
/// L_n, counted strictly before the first time t >= 1 it is outside B_n.
struct VisitStats {
  double mean = 0.0;
  double varianceEstimate = 0.0;
  std::vector<std::uint64_t> histogram; ///< histogram[k] = #walks with V = k
  std::uint64_t walks = 0;              ///< uncensored walks
  std::uint64_t censored = 0;

  double mean_standard_error() const;
  double zero_fraction() const;
  double zero_standard_error() const;
};

/// Requires y.level = n + 1 <= depth with n >= 1.
VisitStats mc_expected_visits(const LeveledGraph& g, VertexId y, const WalkConfig& config);

struct GoodnessOfFit {
  double chiSquare = 0.0;
  int degreesOfFreedom = 0;
  double pValue = 1.0;
  std::uint64_t sample = 0; ///< walks with V >= 1
};

/// Chi-square test of V | V >= 1 against Geometric(success) on {1, 2, ...}.
/// Bins k = 1..K-1 individually plus a tail bin V >= K, with K chosen so every
/// singleton bin expects at least 5 observations.
GoodnessOfFit geometric_fit(const VisitStats& stats, double success = 1.0 / 3.0);

} // namespace liouville
