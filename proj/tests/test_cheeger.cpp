#include "liouville/cheeger.hpp"
#include "liouville/errors.hpp"
#include "liouville/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace liouville;

namespace {

std::set<std::int64_t> neighbours_of(const LeveledGraph& g, std::int64_t f) {
  std::set<std::int64_t> out;
  for (std::int32_t t : g.slots(f))
    if (t != f)
      out.insert(t);
  return out;
}

// Min |dS|/|S| over nonempty S ⊆ universe with |S| <= maxSize; boundary
// restricted to `within` when it is nonempty.
double oracle_min_ratio(const LeveledGraph& g, const std::vector<std::int64_t>& universe,
                        std::size_t maxSize, const std::set<std::int64_t>& within = {}) {
  double best = INFINITY;
  const std::size_t k = universe.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    std::set<std::int64_t> s;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1)
        s.insert(universe[i]);
    if (s.size() > maxSize)
      continue;
    std::set<std::int64_t> boundary;
    for (std::int64_t x : s)
      for (std::int64_t y : neighbours_of(g, x))
        if (!s.count(y) && (within.empty() || within.count(y)))
          boundary.insert(y);
    best = std::min(best, static_cast<double>(boundary.size()) / static_cast<double>(s.size()));
  }
  return best;
}

std::vector<std::int64_t> flats(const std::vector<VertexId>& vs) {
  std::vector<std::int64_t> out;
  for (const auto& v : vs)
    out.push_back(v.flat());
  return out;
}

} // namespace

TEST_CASE("vertex boundary") {
  const auto g = build_graph(5, {}, 1);
  const std::vector<VertexId> root{{0, 0}};
  CHECK(vertex_boundary_size(g, root) == 2);
  CHECK(vertex_boundary_ratio(g, root) == 2.0);
  // L_1 is joined by a triple edge; its boundary is L_0 and L_2.
  const std::vector<VertexId> level1{{1, 0}, {1, 1}};
  CHECK(vertex_boundary_size(g, level1) == 5);
  for (int m = 0; m <= 3; ++m) {
    const auto ball = ball_vertices(m);
    CHECK(ball.size() == static_cast<std::size_t>(ball_size(m)));
    CHECK(vertex_boundary_size(g, ball) == level_size(m + 1));
  }
}

TEST_CASE("exhaustive search on small universes") {
  for (std::uint64_t seed : {1, 2, 7}) {
    const auto g = build_graph(5, {}, seed);
    const auto universe = ball_vertices(2);
    const auto result = cheeger_brute(g, universe);
    CHECK(result.exhaustive);
    CHECK(result.ratio == doctest::Approx(oracle_min_ratio(g, flats(universe), 64)).epsilon(1e-15));
    CHECK(result.ratio >= 1.0 / 3.0);
    CHECK(vertex_boundary_ratio(g, result.witnessSet) == doctest::Approx(result.ratio));
    CHECK(vertex_boundary_size(g, result.witnessSet) == result.boundarySize);
  }

  const auto g = build_graph(6, {}, 1);
  const std::vector<VertexId> mixed{{2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}, {4, 0}, {4, 5}, {5, 9}};
  const auto r = cheeger_brute(g, mixed);
  CHECK(r.ratio == doctest::Approx(oracle_min_ratio(g, flats(mixed), 64)));
}

TEST_CASE("exhaustive search refusals") {
  const auto g = build_graph(6, {}, 1);
  CHECK_THROWS_AS(cheeger_brute(g, ball_vertices(4)), ArgumentError);
  const std::vector<VertexId> deepest{{6, 0}};
  CHECK_THROWS_AS(cheeger_brute(g, deepest), ArgumentError);
  CHECK_THROWS_AS(cheeger_brute(g, std::vector<VertexId>{}), ArgumentError);
}

TEST_CASE("heuristic search") {
  const auto g = build_graph(8, {}, 4);

  SUBCASE("never worse than the starting ball") {
    for (int m = 1; m <= 4; ++m) {
      SearchOptions opts;
      opts.initial = ball_vertices(m);
      opts.sizeBudget = 64;
      const auto r = cheeger_search(g, opts);
      const double start = std::ldexp(1.0, m + 1) / (std::ldexp(1.0, m + 1) - 1.0);
      CHECK(r.ratio <= start + 1e-15);
      CHECK_FALSE(r.exhaustive);
      CHECK(static_cast<std::int64_t>(r.witnessSet.size()) <= opts.sizeBudget);
      CHECK(vertex_boundary_ratio(g, r.witnessSet) == doctest::Approx(r.ratio));
    }
  }

  SUBCASE("greedy from a random singleton") {
    SearchOptions opts;
    opts.seed = 3;
    const auto r = cheeger_search(g, opts);
    CHECK(r.ratio <= 6.0);
    CHECK(r.ratio > 0.0);
  }

  SUBCASE("anneal is deterministic") {
    SearchOptions opts;
    opts.heuristic = SearchHeuristic::anneal;
    opts.seed = 12;
    opts.sizeBudget = 32;
    const auto a = cheeger_search(g, opts);
    const auto b = cheeger_search(g, opts);
    CHECK(a.ratio == b.ratio);
    CHECK(a.witnessSet == b.witnessSet);
    for (const auto& v : a.witnessSet)
      CHECK(v.level < g.depth());
  }

  CHECK(parse_search_heuristic("anneal") == SearchHeuristic::anneal);
  CHECK_THROWS_AS(parse_search_heuristic("tabu"), ArgumentError);
}

TEST_CASE("ball expansion") {
  const auto g = build_graph(6, {}, 2);

  SUBCASE("radius 0") {
    const auto b = ball_cheeger(g, {3, 2}, 0);
    CHECK(b.ball.size() == 1);
    CHECK_FALSE(b.profile);
  }

  SUBCASE("radius 2 around the root") {
    const auto b = ball_cheeger(g, {0, 0}, 2);
    CHECK(b.ball.size() == 7);
    REQUIRE(b.profile);
    CHECK(b.profile->exhaustive);
    const auto ball = flats(b.ball);
    const std::set<std::int64_t> within(ball.begin(), ball.end());
    CHECK(b.profile->ratio == doctest::Approx(oracle_min_ratio(g, ball, 3, within)));
  }

  SUBCASE("radius 2 around (1,0)") {
    const auto b = ball_cheeger(g, {1, 0}, 2);
    CHECK(b.ball.size() == 11);
    REQUIRE(b.profile);
    const auto ball = flats(b.ball);
    const std::set<std::int64_t> within(ball.begin(), ball.end());
    CHECK(b.profile->ratio == doctest::Approx(oracle_min_ratio(g, ball, 5, within)));
    CHECK(b.profile->witnessSet.size() <= 5);
  }

  SUBCASE("large balls fall back to search") {
    const auto b = ball_cheeger(build_graph(9, {}, 2), {0, 0}, 4);
    CHECK(b.ball.size() > 20);
    REQUIRE(b.profile);
    CHECK_FALSE(b.profile->exhaustive);
    CHECK(b.profile->witnessSet.size() <= b.ball.size() / 2);
  }

  SUBCASE("refusals") {
    CHECK_THROWS_AS(ball_cheeger(g, {4, 0}, 2), ArgumentError);
    CHECK_THROWS_AS(ball_cheeger(g, {0, 0}, -1), ArgumentError);
  }
}
