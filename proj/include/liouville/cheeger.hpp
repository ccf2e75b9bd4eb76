#pragma once

#include "liouville/graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liouville {

/// Best vertex-isoperimetric ratio |dS| / |S| found, with its witness set.
struct CheegerResult {
  double ratio = 0.0;
  std::int64_t boundarySize = 0;
  std::vector<VertexId> witnessSet;
  bool exhaustive = false;
};

/// Distinct vertices outside `set` adjacent to it in `g`; self-loops ignored.
std::int64_t vertex_boundary_size(const LeveledGraph& g, std::span<const VertexId> set);
double vertex_boundary_ratio(const LeveledGraph& g, std::span<const VertexId> set);

/// B_m = L_0 ∪ ... ∪ L_m in flat order.
std::vector<VertexId> ball_vertices(int m);

/// Exact min of |dS|/|S| over all nonempty S ⊆ universe, boundary taken in g.
/// The universe must lie in B_(depth-1) so every boundary vertex exists.
/// Refuses universes larger than maxExhaustive. Ties resolve to the first
/// subset in bitmask order.
CheegerResult cheeger_brute(const LeveledGraph& g, std::span<const VertexId> universe,
                            int maxExhaustive = 20);

enum class SearchHeuristic { greedy, anneal };

std::string to_string(SearchHeuristic heuristic);
SearchHeuristic parse_search_heuristic(const std::string& text);

struct SearchOptions {
  std::int64_t sizeBudget = 64;
  SearchHeuristic heuristic = SearchHeuristic::greedy;
  std::uint64_t seed = 0;
  /// Starting set; a seeded random singleton when empty.
  std::vector<VertexId> initial;
  int annealSteps = 20000;
};

/// Upper-bound search for small |dS|/|S| over sets in B_(depth-1) of size at
/// most sizeBudget. The starting set is itself a candidate. Deterministic
/// given the options.
CheegerResult cheeger_search(const LeveledGraph& g, const SearchOptions& options);

/// Expansion of the ball around `center` as an induced finite graph: min of
/// |dS|/|S| over 1 <= |S| <= |ball|/2 with the boundary inside the ball.
struct BallExpansion {
  VertexId center;
  int radius = 0;
  std::vector<VertexId> ball;
  /// Empty when no admissible S exists (single-vertex ball).
  std::optional<CheegerResult> profile;
};

/// Brute force up to 20 ball vertices, greedy + anneal bound above. Refuses
/// balls that reach level depth.
BallExpansion ball_cheeger(const LeveledGraph& g, VertexId center, int radius,
                           std::uint64_t seed = 0);

} // namespace liouville
