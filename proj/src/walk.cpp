#include "liouville/walk.hpp"

#include "liouville/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace liouville {

namespace {

inline int level_of(std::int64_t flat) {
  return std::bit_width(static_cast<std::uint64_t>(flat + 1)) - 1;
}

inline std::int64_t step(const LeveledGraph& g, std::int64_t flat, Xoshiro256& rng) {
  const auto slots = g.slots(flat);
  return slots[rng.below(slots.size())];
}

// Splits [0, walks) into contiguous chunks, one per worker. Each worker fills
// its own accumulator; the caller merges them. Walk k always draws from
// walk_stream(seed, k), so the merged counts do not depend on the split.
template <typename Acc, typename Body>
std::vector<Acc> run_chunks(const WalkConfig& config, const Acc& init, Body body) {
  const auto workers = static_cast<std::uint64_t>(std::max(1, config.workers));
  std::vector<Acc> partial(workers, init);
  const std::uint64_t chunk = (config.walks + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min(config.walks, w * chunk);
    const std::uint64_t end = std::min(config.walks, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      for (std::uint64_t k = begin; k < end; ++k) {
        Xoshiro256 rng = walk_stream(config.masterSeed, k);
        body(partial[w], rng);
      }
    });
  }
  for (auto& t : threads)
    t.join();
  return partial;
}

void require_walk_config(const WalkConfig& config) {
  if (config.walks == 0)
    throw ArgumentError("walk count must be positive");
  if (config.maxSteps == 0)
    throw ArgumentError("maxSteps must be positive");
}

} // namespace

WalkOutcome run_absorbed_walk(const LeveledGraph& g, VertexId start, int absorbLevel,
                              Xoshiro256& rng, std::uint64_t maxSteps) {
  if (!g.contains(start) || absorbLevel < start.level || absorbLevel > g.depth())
    throw ArgumentError("absorbed walk needs start.level <= n <= depth (start " +
                        to_string(start) + ", n=" + std::to_string(absorbLevel) + ")");
  std::int64_t position = start.flat();
  WalkOutcome out;
  while (level_of(position) != absorbLevel) {
    if (out.steps == maxSteps) {
      out.censored = true;
      break;
    }
    position = step(g, position, rng);
    ++out.steps;
  }
  out.absorbedAt = VertexId::from_flat(position);
  return out;
}

HarmonicMeasure mc_harmonic_measure(const LeveledGraph& g, VertexId u, int n,
                                    const WalkConfig& config) {
  require_walk_config(config);
  if (!g.contains(u) || n < u.level || n > g.depth())
    throw ArgumentError("harmonic measure needs u.level <= n <= depth");

  struct Counts {
    std::vector<std::uint64_t> hits;
    std::uint64_t censored = 0;
  };
  const Counts init{std::vector<std::uint64_t>(static_cast<std::size_t>(level_size(n)), 0), 0};
  auto partial = run_chunks(config, init, [&](Counts& acc, Xoshiro256& rng) {
    const WalkOutcome w = run_absorbed_walk(g, u, n, rng, config.maxSteps);
    if (w.censored)
      ++acc.censored;
    else
      ++acc.hits[static_cast<std::size_t>(w.absorbedAt.index)];
  });

  Counts total = init;
  for (const auto& p : partial) {
    total.censored += p.censored;
    for (std::size_t i = 0; i < total.hits.size(); ++i)
      total.hits[i] += p.hits[i];
  }

  HarmonicMeasure mu;
  mu.level = n;
  mu.start = u;
  mu.method = MeasureMethod::monteCarlo;
  mu.censored = total.censored;
  mu.walks = config.walks - total.censored;
  mu.weights = Eigen::VectorXd::Zero(level_size(n));
  mu.standardErrors = Eigen::VectorXd::Zero(level_size(n));
  if (mu.walks == 0)
    throw NumericError("every walk was censored", 1.0);
  const auto accepted = static_cast<double>(mu.walks);
  for (std::size_t i = 0; i < total.hits.size(); ++i) {
    const double p = static_cast<double>(total.hits[i]) / accepted;
    mu.weights(static_cast<Eigen::Index>(i)) = p;
    mu.standardErrors(static_cast<Eigen::Index>(i)) = std::sqrt(p * (1.0 - p) / accepted);
  }
  return mu;
}

double VisitStats::mean_standard_error() const {
  return walks == 0 ? 0.0 : std::sqrt(varianceEstimate / static_cast<double>(walks));
}

double VisitStats::zero_fraction() const {
  return walks == 0 || histogram.empty()
             ? 0.0
             : static_cast<double>(histogram[0]) / static_cast<double>(walks);
}

double VisitStats::zero_standard_error() const {
  const double p = zero_fraction();
  return walks == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(walks));
}

VisitStats mc_expected_visits(const LeveledGraph& g, VertexId y, const WalkConfig& config) {
  require_walk_config(config);
  if (!g.contains(y) || y.level < 2)
    throw ArgumentError("visit count needs y in L_(n+1) with n >= 1 and n + 1 <= depth");
  const int n = y.level - 1;

  struct Counts {
    std::vector<std::uint64_t> histogram;
    std::uint64_t censored = 0;
  };
  auto partial = run_chunks(config, Counts{}, [&](Counts& acc, Xoshiro256& rng) {
    std::int64_t position = y.flat();
    std::uint64_t visits = 0;
    for (std::uint64_t t = 1;; ++t) {
      if (t > config.maxSteps) {
        ++acc.censored;
        return;
      }
      position = step(g, position, rng);
      const int level = level_of(position);
      if (level > n)
        break;
      if (level == n)
        ++visits;
    }
    if (acc.histogram.size() <= visits)
      acc.histogram.resize(visits + 1, 0);
    ++acc.histogram[visits];
  });

  VisitStats stats;
  for (const auto& p : partial) {
    stats.censored += p.censored;
    if (stats.histogram.size() < p.histogram.size())
      stats.histogram.resize(p.histogram.size(), 0);
    for (std::size_t k = 0; k < p.histogram.size(); ++k)
      stats.histogram[k] += p.histogram[k];
  }
  stats.walks = config.walks - stats.censored;
  if (stats.walks == 0)
    throw NumericError("every walk was censored", 1.0);

  const auto total = static_cast<double>(stats.walks);
  double sum = 0.0;
  for (std::size_t k = 0; k < stats.histogram.size(); ++k)
    sum += static_cast<double>(k) * static_cast<double>(stats.histogram[k]);
  stats.mean = sum / total;
  double squares = 0.0;
  for (std::size_t k = 0; k < stats.histogram.size(); ++k) {
    const double d = static_cast<double>(k) - stats.mean;
    squares += d * d * static_cast<double>(stats.histogram[k]);
  }
  stats.varianceEstimate = stats.walks > 1 ? squares / (total - 1.0) : 0.0;
  return stats;
}

GoodnessOfFit geometric_fit(const VisitStats& stats, double success) {
  if (!(success > 0.0 && success < 1.0))
    throw ArgumentError("geometric success probability must lie in (0, 1)");
  GoodnessOfFit fit;
  for (std::size_t k = 1; k < stats.histogram.size(); ++k)
    fit.sample += stats.histogram[k];
  if (fit.sample == 0)
    return fit;

  const auto sample = static_cast<double>(fit.sample);
  const double fail = 1.0 - success;
  // Largest k whose singleton bin still expects >= 5 observations.
  std::size_t lastSingleton = 0;
  while (sample * std::pow(fail, static_cast<double>(lastSingleton)) * success >= 5.0)
    ++lastSingleton;
  const std::size_t tailStart = lastSingleton + 1;

  auto observed = [&](std::size_t k) {
    return k < stats.histogram.size() ? static_cast<double>(stats.histogram[k]) : 0.0;
  };
  for (std::size_t k = 1; k < tailStart; ++k) {
    const double expected = sample * std::pow(fail, static_cast<double>(k - 1)) * success;
    const double d = observed(k) - expected;
    fit.chiSquare += d * d / expected;
  }
  double tailObserved = 0.0;
  for (std::size_t k = tailStart; k < stats.histogram.size(); ++k)
    tailObserved += observed(k);
  const double tailExpected = sample * std::pow(fail, static_cast<double>(tailStart - 1));
  fit.chiSquare += (tailObserved - tailExpected) * (tailObserved - tailExpected) / tailExpected;

  fit.degreesOfFreedom = static_cast<int>(tailStart) - 1;
  if (fit.degreesOfFreedom < 1) {
    fit.pValue = 1.0;
    return fit;
  }
  const boost::math::chi_squared_distribution<double> dist(fit.degreesOfFreedom);
  fit.pValue = boost::math::cdf(boost::math::complement(dist, fit.chiSquare));
  return fit;
}

} // namespace liouville
