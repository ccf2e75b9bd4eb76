#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace liouville {

/// Deepest tree the library will allocate; 2^(25) - 1 vertices.
inline constexpr int kMaxDepth = 24;

/// Number of vertices on level `level` of the binary tree.
inline constexpr std::int64_t level_size(int level) { return std::int64_t{1} << level; }

/// Number of vertices in the ball B_level = L_0 ∪ ... ∪ L_level.
inline constexpr std::int64_t ball_size(int level) { return level_size(level + 1) - 1; }

/// A vertex (n, i) of the tree: level n, index i in [0, 2^n).
struct VertexId {
  int level = 0;
  std::int64_t index = 0;

  friend auto operator<=>(const VertexId&, const VertexId&) = default;

  /// Position in level-major order: (n, i) -> 2^n - 1 + i.
  std::int64_t flat() const { return level_size(level) - 1 + index; }
  static VertexId from_flat(std::int64_t flat);

  VertexId parent() const { return {level - 1, index >> 1}; }
  VertexId left_child() const { return {level + 1, 2 * index}; }
  VertexId right_child() const { return {level + 1, 2 * index + 1}; }

  bool is_valid() const { return level >= 0 && index >= 0 && index < level_size(level); }
};

std::string to_string(VertexId v);

/// Parses "level:index".
VertexId parse_vertex(const std::string& text);

enum class ExpanderModel { forced, pairing, cycleMatching };

std::string to_string(ExpanderModel model);
ExpanderModel parse_expander_model(const std::string& text);

/// The 3-regular multigraph placed on one level.
struct ExpanderLayer {
  int level = 0;
  /// Canonical multiset: pairs (i, j) with i <= j, sorted; repeats encode multiplicity.
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  std::optional<double> certifiedGap;
  std::uint64_t generatorSeed = 0;
  /// Absent when the layer was loaded from a file and is not a forced layer.
  std::optional<ExpanderModel> model;

  std::int64_t num_vertices() const { return level_size(level); }
  /// Per-vertex neighbour lists with multiplicity, each sorted.
  std::vector<std::vector<std::int64_t>> neighbours() const;
};

struct ExpanderConfig {
  ExpanderModel model = ExpanderModel::pairing;
  double minGap = 0.02;
  int maxRetries = 100;
};

/// Samples a 3-regular layer on `numVertices` vertices.
///
/// Sizes 1, 2 and 4 return the unique forced layer whatever the model. Larger
/// sizes are resampled until the layer is simple and its two-sided spectral gap
/// reaches `minGap`; `maxRetries` bounds the number of certified candidates.
/// Throws ArgumentError for a non-power-of-two size or minGap outside [0, 1),
/// GenerationError when the retry budget runs out.
ExpanderLayer build_expander_layer(std::int64_t numVertices, ExpanderModel model,
                                   std::uint64_t seed, double minGap = 0.02,
                                   int maxRetries = 100);

enum class GraphVariant { standard, unbalancedTree };

std::string to_string(GraphVariant variant);

/// One step-law entry after merging slots with equal targets.
struct StepMass {
  VertexId target;
  boost::rational<std::int64_t> probability;
};

/// A depth-N binary tree, optionally with an expander on every level.
///
/// Every vertex owns a list of step slots; the random walk picks one slot
/// uniformly. In the standard variant each vertex has exactly six slots
/// (parent, left child, right child, three expander neighbours), with any
/// structurally missing slot turned into a self-loop. In the unbalanced
/// variant the slots are the incident tree edges with multiplicity (the
/// right-child edge is doubled). Immutable after construction.
class LeveledGraph {
public:
  int depth() const { return depth_; }
  GraphVariant variant() const { return variant_; }
  std::uint64_t master_seed() const { return masterSeed_; }
  std::int64_t vertex_count() const { return ball_size(depth_); }

  /// Layers for levels 0..depth (standard variant); empty for the unbalanced tree.
  const std::vector<ExpanderLayer>& layers() const { return layers_; }
  const ExpanderLayer& layer(int level) const;

  bool contains(VertexId v) const { return v.is_valid() && v.level <= depth_; }

  /// Slot targets of the vertex with flat id `flat`, as flat ids.
  std::span<const std::int32_t> slots(std::int64_t flat) const {
    return {slots_.data() + offsets_[flat], slots_.data() + offsets_[flat + 1]};
  }
  std::span<const std::int32_t> slots(VertexId v) const { return slots(v.flat()); }

  static LeveledGraph from_layers(int depth, std::uint64_t masterSeed,
                                  std::vector<ExpanderLayer> layers);
  static LeveledGraph unbalanced_tree(int depth);

private:
  LeveledGraph() = default;

  int depth_ = 0;
  GraphVariant variant_ = GraphVariant::standard;
  std::uint64_t masterSeed_ = 0;
  std::vector<ExpanderLayer> layers_;
  std::vector<std::int64_t> offsets_;
  std::vector<std::int32_t> slots_;
};

/// Standard-variant graph of the given depth. Layer seeds are derived from
/// (masterSeed, level); the result is a pure function of the arguments.
/// A failing layer rethrows GenerationError annotated with its level.
LeveledGraph build_graph(int depth, const ExpanderConfig& config, std::uint64_t masterSeed);

/// Binary tree whose right-child edges are doubled. Deterministic; depth >= 1.
LeveledGraph build_unbalanced_tree(int depth);

/// Step law at `v`, merged by target and sorted by target.
std::vector<StepMass> step_distribution(const LeveledGraph& g, VertexId v);

} // namespace liouville
