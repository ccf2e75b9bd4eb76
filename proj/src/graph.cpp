#include "liouville/graph.hpp"

#include "liouville/errors.hpp"
#include "liouville/rng.hpp"
#include "liouville/spectral.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <map>
#include <numeric>

namespace liouville {

namespace {

constexpr int kExpanderDegree = 3;
constexpr int kStandardSlots = 6;
// Rejected non-simple pairings are not counted against maxRetries.
constexpr int kMaxSimpleDraws = 100000;

using Edge = std::pair<std::int64_t, std::int64_t>;

Edge ordered(std::int64_t a, std::int64_t b) { return a <= b ? Edge{a, b} : Edge{b, a}; }

std::vector<Edge> forced_edges(std::int64_t m) {
  std::vector<Edge> edges;
  if (m == 2) {
    edges.assign(3, {0, 1});
  } else if (m == 4) {
    for (std::int64_t i = 0; i < 4; ++i)
      for (std::int64_t j = i + 1; j < 4; ++j)
        edges.emplace_back(i, j);
  }
  return edges;
}

bool canonicalize_if_simple(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].first == edges[k].second)
      return false;
    if (k > 0 && edges[k] == edges[k - 1])
      return false;
  }
  return true;
}

template <typename Range>
void shuffle(Range& values, Xoshiro256& rng) {
  for (std::size_t i = values.size(); i > 1; --i)
    std::swap(values[i - 1], values[rng.below(i)]);
}

std::vector<Edge> sample_pairing(std::int64_t m, Xoshiro256& rng) {
  std::vector<std::int64_t> stubs(static_cast<std::size_t>(kExpanderDegree * m));
  for (std::size_t s = 0; s < stubs.size(); ++s)
    stubs[s] = static_cast<std::int64_t>(s) / kExpanderDegree;
  shuffle(stubs, rng);
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t s = 0; s + 1 < stubs.size(); s += 2)
    edges.push_back(ordered(stubs[s], stubs[s + 1]));
  return edges;
}

std::vector<Edge> sample_cycle_matching(std::int64_t m, Xoshiro256& rng) {
  std::vector<std::int64_t> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(3 * m / 2));
  for (std::int64_t k = 0; k < m; ++k)
    edges.push_back(ordered(order[k], order[(k + 1) % m]));
  shuffle(order, rng);
  for (std::int64_t k = 0; k + 1 < m; k += 2)
    edges.push_back(ordered(order[k], order[k + 1]));
  return edges;
}

std::vector<Edge> sample_simple(std::int64_t m, ExpanderModel model, Xoshiro256& rng) {
  for (int draw = 0; draw < kMaxSimpleDraws; ++draw) {
    auto edges = model == ExpanderModel::cycleMatching ? sample_cycle_matching(m, rng)
                                                       : sample_pairing(m, rng);
    if (canonicalize_if_simple(edges))
      return edges;
  }
  throw GenerationError("no simple 3-regular sample on " + std::to_string(m) + " vertices after " +
                            std::to_string(kMaxSimpleDraws) + " draws",
                        0.0);
}

void validate_layer(const ExpanderLayer& layer, int expectedLevel) {
  const auto where = "level " + std::to_string(expectedLevel) + ": ";
  if (layer.level != expectedLevel)
    throw ValidationError(where + "layer carries level " + std::to_string(layer.level));
  const std::int64_t m = layer.num_vertices();
  std::vector<int> degree(static_cast<std::size_t>(m), 0);
  for (const auto& [i, j] : layer.edges) {
    if (i < 0 || j < 0 || i >= m || j >= m)
      throw ValidationError(where + "edge (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") out of range");
    if (i == j)
      throw ValidationError(where + "self-loop at " + std::to_string(i));
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(j)];
  }
  if (expectedLevel == 0) {
    if (!layer.edges.empty())
      throw ValidationError(where + "level 0 must have no expander edges");
    return;
  }
  for (std::int64_t v = 0; v < m; ++v)
    if (degree[static_cast<std::size_t>(v)] != kExpanderDegree)
      throw ValidationError(where + "vertex " + std::to_string(v) + " has expander degree " +
                            std::to_string(degree[static_cast<std::size_t>(v)]) + ", expected 3");
}

} // namespace

VertexId VertexId::from_flat(std::int64_t flat) {
  const int level = std::bit_width(static_cast<std::uint64_t>(flat + 1)) - 1;
  return {level, flat + 1 - level_size(level)};
}

std::string to_string(VertexId v) {
  return std::to_string(v.level) + ":" + std::to_string(v.index);
}

VertexId parse_vertex(const std::string& text) {
  const auto colon = text.find(':');
  VertexId v{-1, -1};
  if (colon != std::string::npos) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [p1, e1] = std::from_chars(begin, begin + colon, v.level);
    auto [p2, e2] = std::from_chars(begin + colon + 1, end, v.index);
    if (e1 == std::errc{} && e2 == std::errc{} && p1 == begin + colon && p2 == end && v.is_valid())
      return v;
  }
  throw ArgumentError("vertex must be LEVEL:INDEX with 0 <= INDEX < 2^LEVEL, got '" + text + "'");
}

std::string to_string(ExpanderModel model) {
  switch (model) {
  case ExpanderModel::forced:
    return "forced";
  case ExpanderModel::pairing:
    return "pairing";
  case ExpanderModel::cycleMatching:
    return "cycle";
  }
  return "unknown";
}

ExpanderModel parse_expander_model(const std::string& text) {
  if (text == "pairing")
    return ExpanderModel::pairing;
  if (text == "cycle" || text == "cycleMatching")
    return ExpanderModel::cycleMatching;
  if (text == "forced")
    return ExpanderModel::forced;
  throw ArgumentError("unknown expander model '" + text + "' (pairing, cycle)");
}

std::string to_string(GraphVariant variant) {
  return variant == GraphVariant::standard ? "standard" : "unbalanced";
}

std::vector<std::vector<std::int64_t>> ExpanderLayer::neighbours() const {
  std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(num_vertices()));
  for (const auto& [i, j] : edges) {
    out[static_cast<std::size_t>(i)].push_back(j);
    out[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& list : out)
    std::sort(list.begin(), list.end());
  return out;
}

ExpanderLayer build_expander_layer(std::int64_t numVertices, ExpanderModel model,
                                   std::uint64_t seed, double minGap, int maxRetries) {
  if (numVertices < 1 || !std::has_single_bit(static_cast<std::uint64_t>(numVertices)))
    throw ArgumentError("layer size must be a power of two, got " + std::to_string(numVertices));
  if (!(minGap >= 0.0 && minGap < 1.0))
    throw ArgumentError("minGap must lie in [0, 1)");
  if (maxRetries < 1)
    throw ArgumentError("maxRetries must be positive");

  ExpanderLayer layer;
  layer.level = std::bit_width(static_cast<std::uint64_t>(numVertices)) - 1;
  layer.generatorSeed = seed;

  if (numVertices <= 4) {
    layer.model = ExpanderModel::forced;
    layer.edges = forced_edges(numVertices);
    if (numVertices > 1)
      layer.certifiedGap = walk_operator_gap(numVertices, layer.edges).gap;
    return layer;
  }
  if (model == ExpanderModel::forced)
    throw ArgumentError("forced model only exists for 1, 2 or 4 vertices");

  layer.model = model;
  Xoshiro256 rng(seed);
  double bestGap = -1.0;
  for (int attempt = 0; attempt < maxRetries; ++attempt) {
    auto edges = sample_simple(numVertices, model, rng);
    const double gap = walk_operator_gap(numVertices, edges).gap;
    if (gap >= minGap) {
      layer.edges = std::move(edges);
      layer.certifiedGap = gap;
      return layer;
    }
    bestGap = std::max(bestGap, gap);
  }
  throw GenerationError("no layer on " + std::to_string(numVertices) + " vertices reached gap " +
                            std::to_string(minGap) + " in " + std::to_string(maxRetries) +
                            " attempts; best gap " + std::to_string(bestGap),
                        bestGap);
}

const ExpanderLayer& LeveledGraph::layer(int level) const {
  if (variant_ != GraphVariant::standard)
    throw ArgumentError("unbalanced tree has no expander layers");
  if (level < 0 || level > depth_)
    throw ArgumentError("level " + std::to_string(level) + " outside graph of depth " +
                        std::to_string(depth_));
  return layers_[static_cast<std::size_t>(level)];
}

LeveledGraph LeveledGraph::from_layers(int depth, std::uint64_t masterSeed,
                                       std::vector<ExpanderLayer> layers) {
  if (depth < 0 || depth > kMaxDepth)
    throw ArgumentError("depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
  if (layers.size() != static_cast<std::size_t>(depth) + 1)
    throw ValidationError("expected " + std::to_string(depth + 1) + " layers, got " +
                          std::to_string(layers.size()));
  for (int n = 0; n <= depth; ++n)
    validate_layer(layers[static_cast<std::size_t>(n)], n);

  LeveledGraph g;
  g.depth_ = depth;
  g.variant_ = GraphVariant::standard;
  g.masterSeed_ = masterSeed;
  g.layers_ = std::move(layers);

  const std::int64_t count = g.vertex_count();
  g.offsets_.resize(static_cast<std::size_t>(count) + 1);
  g.slots_.reserve(static_cast<std::size_t>(count * kStandardSlots));
  for (int n = 0; n <= depth; ++n) {
    const auto nbrs = g.layers_[static_cast<std::size_t>(n)].neighbours();
    for (std::int64_t i = 0; i < level_size(n); ++i) {
      const VertexId v{n, i};
      const auto self = static_cast<std::int32_t>(v.flat());
      g.offsets_[static_cast<std::size_t>(self)] = static_cast<std::int64_t>(g.slots_.size());
      g.slots_.push_back(n == 0 ? self : static_cast<std::int32_t>(v.parent().flat()));
      g.slots_.push_back(n == depth ? self : static_cast<std::int32_t>(v.left_child().flat()));
      g.slots_.push_back(n == depth ? self : static_cast<std::int32_t>(v.right_child().flat()));
      if (n == 0) {
        g.slots_.insert(g.slots_.end(), kExpanderDegree, self);
      } else {
        for (std::int64_t j : nbrs[static_cast<std::size_t>(i)])
          g.slots_.push_back(static_cast<std::int32_t>(VertexId{n, j}.flat()));
      }
    }
  }
  g.offsets_[static_cast<std::size_t>(count)] = static_cast<std::int64_t>(g.slots_.size());
  return g;
}

LeveledGraph LeveledGraph::unbalanced_tree(int depth) {
  if (depth < 1 || depth > kMaxDepth)
    throw ArgumentError("unbalanced tree depth must lie in [1, " + std::to_string(kMaxDepth) + "]");
  LeveledGraph g;
  g.depth_ = depth;
  g.variant_ = GraphVariant::unbalancedTree;
  const std::int64_t count = g.vertex_count();
  g.offsets_.resize(static_cast<std::size_t>(count) + 1);
  for (std::int64_t flat = 0; flat < count; ++flat) {
    const VertexId v = VertexId::from_flat(flat);
    g.offsets_[static_cast<std::size_t>(flat)] = static_cast<std::int64_t>(g.slots_.size());
    if (v.level > 0) {
      const auto parent = static_cast<std::int32_t>(v.parent().flat());
      g.slots_.insert(g.slots_.end(), (v.index & 1) ? 2 : 1, parent);
    }
    if (v.level < depth) {
      g.slots_.push_back(static_cast<std::int32_t>(v.left_child().flat()));
      g.slots_.insert(g.slots_.end(), 2, static_cast<std::int32_t>(v.right_child().flat()));
    }
  }
  g.offsets_[static_cast<std::size_t>(count)] = static_cast<std::int64_t>(g.slots_.size());
  return g;
}

LeveledGraph build_graph(int depth, const ExpanderConfig& config, std::uint64_t masterSeed) {
  if (depth < 0 || depth > kMaxDepth)
    throw ArgumentError("depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
  std::vector<ExpanderLayer> layers;
  layers.reserve(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) {
    const std::uint64_t seed = derive_seed(masterSeed, static_cast<std::uint64_t>(n));
    try {
      layers.push_back(build_expander_layer(level_size(n), config.model, seed, config.minGap,
                                            config.maxRetries));
    } catch (const GenerationError& e) {
      throw GenerationError("level " + std::to_string(n) + ": " + e.what(), e.bestGap());
    }
  }
  return LeveledGraph::from_layers(depth, masterSeed, std::move(layers));
}

LeveledGraph build_unbalanced_tree(int depth) { return LeveledGraph::unbalanced_tree(depth); }

std::vector<StepMass> step_distribution(const LeveledGraph& g, VertexId v) {
  if (!g.contains(v))
    throw ArgumentError("vertex " + to_string(v) + " not in graph");
  const auto slots = g.slots(v);
  std::map<std::int32_t, std::int64_t> counts;
  for (std::int32_t target : slots)
    ++counts[target];
  std::vector<StepMass> out;
  out.reserve(counts.size());
  const auto total = static_cast<std::int64_t>(slots.size());
  for (const auto& [target, count] : counts)
    out.push_back({VertexId::from_flat(target), boost::rational<std::int64_t>(count, total)});
  return out;
}

} // namespace liouville
