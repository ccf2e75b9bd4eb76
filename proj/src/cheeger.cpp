#include "liouville/cheeger.hpp"

#include "liouville/errors.hpp"
#include "liouville/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace liouville {

namespace {

// Vertices that may join S are "members"; other nodes only count as boundary.
struct SetSystem {
  std::vector<std::vector<int>> adj; // distinct neighbours, no self
  std::vector<char> member;
  std::vector<std::int64_t> flat;
};

std::vector<std::int32_t> distinct_neighbours(const LeveledGraph& g, std::int64_t flat) {
  std::vector<std::int32_t> out;
  for (std::int32_t t : g.slots(flat))
    if (t != flat)
      out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Universe members first (in the given order), then outside neighbours.
SetSystem ambient_system(const LeveledGraph& g, std::span<const std::int64_t> universe) {
  SetSystem sys;
  std::unordered_map<std::int64_t, int> local;
  auto intern = [&](std::int64_t flat, bool member) {
    auto [it, inserted] = local.try_emplace(flat, static_cast<int>(sys.flat.size()));
    if (inserted) {
      sys.flat.push_back(flat);
      sys.member.push_back(member ? 1 : 0);
      sys.adj.emplace_back();
    }
    return it->second;
  };
  for (std::int64_t f : universe)
    intern(f, true);
  for (std::int64_t f : universe) {
    const int id = local.at(f);
    for (std::int32_t t : distinct_neighbours(g, f)) {
      const int other = intern(t, false);
      sys.adj[static_cast<std::size_t>(id)].push_back(other);
    }
  }
  return sys;
}

SetSystem induced_system(const LeveledGraph& g, std::span<const std::int64_t> vertices) {
  SetSystem sys;
  std::unordered_map<std::int64_t, int> local;
  for (std::int64_t f : vertices) {
    local.emplace(f, static_cast<int>(sys.flat.size()));
    sys.flat.push_back(f);
  }
  sys.member.assign(sys.flat.size(), 1);
  sys.adj.resize(sys.flat.size());
  for (std::size_t k = 0; k < sys.flat.size(); ++k)
    for (std::int32_t t : distinct_neighbours(g, sys.flat[k]))
      if (auto it = local.find(t); it != local.end())
        sys.adj[k].push_back(it->second);
  return sys;
}

bool better(std::int64_t boundaryA, std::int64_t sizeA, std::int64_t boundaryB,
            std::int64_t sizeB) {
  return boundaryA * sizeB < boundaryB * sizeA;
}

CheegerResult make_result(const SetSystem& sys, const std::vector<int>& set,
                          std::int64_t boundary, bool exhaustive) {
  CheegerResult r;
  r.boundarySize = boundary;
  r.ratio = static_cast<double>(boundary) / static_cast<double>(set.size());
  r.exhaustive = exhaustive;
  for (int id : set)
    r.witnessSet.push_back(VertexId::from_flat(sys.flat[static_cast<std::size_t>(id)]));
  std::sort(r.witnessSet.begin(), r.witnessSet.end());
  return r;
}

// Members must occupy local ids [0, k).
CheegerResult brute_force(const SetSystem& sys, int k, int maxSetSize) {
  std::vector<std::uint32_t> stamp(sys.flat.size(), 0);
  std::int64_t bestBoundary = 1;
  std::int64_t bestSize = 0;
  std::uint32_t bestMask = 0;
  std::uint32_t generation = 0;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
    const int size = std::popcount(mask);
    if (size > maxSetSize)
      continue;
    ++generation;
    std::int64_t boundary = 0;
    for (int v = 0; v < k; ++v) {
      if (!(mask >> v & 1U))
        continue;
      for (int w : sys.adj[static_cast<std::size_t>(v)]) {
        const bool inside = w < k && (mask >> w & 1U);
        if (!inside && stamp[static_cast<std::size_t>(w)] != generation) {
          stamp[static_cast<std::size_t>(w)] = generation;
          ++boundary;
        }
      }
    }
    if (bestSize == 0 || better(boundary, size, bestBoundary, bestSize)) {
      bestBoundary = boundary;
      bestSize = size;
      bestMask = mask;
    }
  }
  std::vector<int> set;
  for (int v = 0; v < k; ++v)
    if (bestMask >> v & 1U)
      set.push_back(v);
  return make_result(sys, set, bestBoundary, true);
}

class IndexedSet {
public:
  explicit IndexedSet(std::size_t universe) : position_(universe, -1) {}
  bool contains(int v) const { return position_[static_cast<std::size_t>(v)] >= 0; }
  void insert(int v) {
    if (contains(v))
      return;
    position_[static_cast<std::size_t>(v)] = static_cast<int>(items_.size());
    items_.push_back(v);
  }
  void erase(int v) {
    const int pos = position_[static_cast<std::size_t>(v)];
    if (pos < 0)
      return;
    const int last = items_.back();
    items_[static_cast<std::size_t>(pos)] = last;
    position_[static_cast<std::size_t>(last)] = pos;
    items_.pop_back();
    position_[static_cast<std::size_t>(v)] = -1;
  }
  const std::vector<int>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

private:
  std::vector<int> position_;
  std::vector<int> items_;
};

// Incrementally maintained set S with its vertex boundary.
class SetState {
public:
  explicit SetState(const SetSystem& sys)
      : sys_(sys), inside_(sys.flat.size()), boundary_(sys.flat.size()),
        hits_(sys.flat.size(), 0) {}

  std::int64_t size() const { return static_cast<std::int64_t>(inside_.size()); }
  std::int64_t boundary() const { return static_cast<std::int64_t>(boundary_.size()); }
  const IndexedSet& inside() const { return inside_; }
  const IndexedSet& boundary_set() const { return boundary_; }

  /// Boundary size after adding v.
  std::int64_t boundary_if_added(int v) const {
    std::int64_t b = boundary() - (boundary_.contains(v) ? 1 : 0);
    for (int w : sys_.adj[static_cast<std::size_t>(v)])
      if (!inside_.contains(w) && hits_[static_cast<std::size_t>(w)] == 0)
        ++b;
    return b;
  }

  void add(int v) {
    boundary_.erase(v);
    inside_.insert(v);
    for (int w : sys_.adj[static_cast<std::size_t>(v)]) {
      if (hits_[static_cast<std::size_t>(w)]++ == 0 && !inside_.contains(w))
        boundary_.insert(w);
    }
  }

  void remove(int v) {
    inside_.erase(v);
    for (int w : sys_.adj[static_cast<std::size_t>(v)]) {
      if (--hits_[static_cast<std::size_t>(w)] == 0)
        boundary_.erase(w);
    }
    if (hits_[static_cast<std::size_t>(v)] > 0)
      boundary_.insert(v);
  }

private:
  const SetSystem& sys_;
  IndexedSet inside_;
  IndexedSet boundary_;
  std::vector<int> hits_;
};

struct Best {
  std::int64_t boundary = 0;
  std::int64_t size = 0;
  std::vector<int> set;

  void offer(const SetState& s) {
    if (size == 0 || better(s.boundary(), s.size(), boundary, size)) {
      boundary = s.boundary();
      size = s.size();
      set = s.inside().items();
    }
  }
};

void run_greedy(const SetSystem& sys, SetState& state, std::int64_t budget, Best& best) {
  best.offer(state);
  while (state.size() < budget) {
    int pick = -1;
    std::int64_t pickBoundary = 0;
    for (int c : state.boundary_set().items()) {
      if (!sys.member[static_cast<std::size_t>(c)])
        continue;
      const std::int64_t b = state.boundary_if_added(c);
      if (pick < 0 || b < pickBoundary ||
          (b == pickBoundary && sys.flat[static_cast<std::size_t>(c)] <
                                    sys.flat[static_cast<std::size_t>(pick)])) {
        pick = c;
        pickBoundary = b;
      }
    }
    if (pick < 0)
      break;
    state.add(pick);
    best.offer(state);
  }
}

void run_anneal(const SetSystem& sys, SetState& state, std::int64_t budget, int steps,
                Xoshiro256& rng, Best& best) {
  best.offer(state);
  const double hot = 1.0;
  const double cold = 1e-3;
  std::vector<int> candidates;
  for (int step = 0; step < steps; ++step) {
    const double temperature = hot * std::pow(cold / hot, static_cast<double>(step) / steps);
    const double before = static_cast<double>(state.boundary()) / static_cast<double>(state.size());
    const bool grow = state.size() < budget && (state.size() == 1 || rng.below(2) == 0);
    if (grow) {
      candidates.clear();
      for (int c : state.boundary_set().items())
        if (sys.member[static_cast<std::size_t>(c)])
          candidates.push_back(c);
      if (candidates.empty())
        continue;
      const int c = candidates[rng.below(candidates.size())];
      const double after = static_cast<double>(state.boundary_if_added(c)) /
                           static_cast<double>(state.size() + 1);
      if (after <= before || rng.uniform() < std::exp((before - after) / temperature)) {
        state.add(c);
        best.offer(state);
      }
    } else {
      if (state.size() <= 1)
        continue;
      const auto& members = state.inside().items();
      const int v = members[rng.below(members.size())];
      state.remove(v);
      const double after = static_cast<double>(state.boundary()) / static_cast<double>(state.size());
      if (after <= before || rng.uniform() < std::exp((before - after) / temperature))
        best.offer(state);
      else
        state.add(v);
    }
  }
}

std::vector<std::int64_t> checked_universe(const LeveledGraph& g, std::span<const VertexId> set) {
  std::vector<std::int64_t> flats;
  flats.reserve(set.size());
  for (const auto& v : set) {
    if (!g.contains(v) || v.level >= g.depth())
      throw ArgumentError("vertex " + to_string(v) + " must lie in B_(depth-1) = B_" +
                          std::to_string(g.depth() - 1) + " so its boundary is in the graph");
    flats.push_back(v.flat());
  }
  std::sort(flats.begin(), flats.end());
  flats.erase(std::unique(flats.begin(), flats.end()), flats.end());
  return flats;
}

} // namespace

std::int64_t vertex_boundary_size(const LeveledGraph& g, std::span<const VertexId> set) {
  std::vector<std::int64_t> inside;
  for (const auto& v : set) {
    if (!g.contains(v))
      throw ArgumentError("vertex " + to_string(v) + " not in graph");
    inside.push_back(v.flat());
  }
  std::sort(inside.begin(), inside.end());
  inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
  std::vector<std::int64_t> outside;
  for (std::int64_t f : inside)
    for (std::int32_t t : distinct_neighbours(g, f))
      if (!std::binary_search(inside.begin(), inside.end(), std::int64_t{t}))
        outside.push_back(t);
  std::sort(outside.begin(), outside.end());
  return std::unique(outside.begin(), outside.end()) - outside.begin();
}

double vertex_boundary_ratio(const LeveledGraph& g, std::span<const VertexId> set) {
  std::vector<VertexId> unique(set.begin(), set.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.empty())
    throw ArgumentError("boundary ratio of the empty set is undefined");
  return static_cast<double>(vertex_boundary_size(g, unique)) /
         static_cast<double>(unique.size());
}

std::vector<VertexId> ball_vertices(int m) {
  std::vector<VertexId> out;
  for (std::int64_t f = 0; f < ball_size(m); ++f)
    out.push_back(VertexId::from_flat(f));
  return out;
}

CheegerResult cheeger_brute(const LeveledGraph& g, std::span<const VertexId> universe,
                            int maxExhaustive) {
  const auto flats = checked_universe(g, universe);
  if (flats.empty())
    throw ArgumentError("universe must be nonempty");
  if (static_cast<int>(flats.size()) > maxExhaustive || maxExhaustive > 30)
    throw ArgumentError("universe of " + std::to_string(flats.size()) +
                        " vertices exceeds the exhaustive limit " +
                        std::to_string(maxExhaustive) + "; use cheeger_search");
  const SetSystem sys = ambient_system(g, flats);
  const int k = static_cast<int>(flats.size());
  return brute_force(sys, k, k);
}

std::string to_string(SearchHeuristic heuristic) {
  return heuristic == SearchHeuristic::greedy ? "greedy" : "anneal";
}

SearchHeuristic parse_search_heuristic(const std::string& text) {
  if (text == "greedy")
    return SearchHeuristic::greedy;
  if (text == "anneal")
    return SearchHeuristic::anneal;
  throw ArgumentError("unknown search heuristic '" + text + "' (greedy, anneal)");
}

CheegerResult cheeger_search(const LeveledGraph& g, const SearchOptions& options) {
  if (g.depth() < 1)
    throw ArgumentError("cheeger search needs depth >= 1");
  if (options.sizeBudget < 1)
    throw ArgumentError("size budget must be positive");

  // All of B_(depth-1) is eligible; level depth only contributes boundary.
  SetSystem sys;
  const std::int64_t eligible = ball_size(g.depth() - 1);
  sys.flat.resize(static_cast<std::size_t>(g.vertex_count()));
  sys.member.resize(sys.flat.size());
  sys.adj.resize(sys.flat.size());
  for (std::int64_t f = 0; f < g.vertex_count(); ++f) {
    sys.flat[static_cast<std::size_t>(f)] = f;
    sys.member[static_cast<std::size_t>(f)] = f < eligible ? 1 : 0;
    if (f < eligible)
      for (std::int32_t t : distinct_neighbours(g, f))
        sys.adj[static_cast<std::size_t>(f)].push_back(t);
  }

  Xoshiro256 rng(derive_seed(options.seed, 0x5ea4c4ULL));
  SetState state(sys);
  if (options.initial.empty()) {
    state.add(static_cast<int>(rng.below(static_cast<std::uint64_t>(eligible))));
  } else {
    for (std::int64_t f : checked_universe(g, options.initial))
      state.add(static_cast<int>(f));
  }
  const std::int64_t budget = std::max(options.sizeBudget, state.size());

  Best best;
  if (options.heuristic == SearchHeuristic::greedy)
    run_greedy(sys, state, budget, best);
  else
    run_anneal(sys, state, budget, options.annealSteps, rng, best);
  return make_result(sys, best.set, best.boundary, false);
}

BallExpansion ball_cheeger(const LeveledGraph& g, VertexId center, int radius,
                           std::uint64_t seed) {
  if (!g.contains(center))
    throw ArgumentError("center " + to_string(center) + " not in graph");
  if (radius < 0)
    throw ArgumentError("radius must be non-negative");

  std::vector<std::int64_t> ball{center.flat()};
  std::unordered_map<std::int64_t, int> distance{{center.flat(), 0}};
  for (std::size_t head = 0; head < ball.size(); ++head) {
    const std::int64_t f = ball[head];
    const int d = distance.at(f);
    if (VertexId::from_flat(f).level >= g.depth())
      throw ArgumentError("ball of radius " + std::to_string(radius) + " around " +
                          to_string(center) + " reaches level " + std::to_string(g.depth()) +
                          "; use a deeper graph");
    if (d == radius)
      continue;
    for (std::int32_t t : distinct_neighbours(g, f))
      if (distance.try_emplace(t, d + 1).second)
        ball.push_back(t);
  }
  std::sort(ball.begin(), ball.end());

  BallExpansion out;
  out.center = center;
  out.radius = radius;
  for (std::int64_t f : ball)
    out.ball.push_back(VertexId::from_flat(f));
  const auto half = static_cast<std::int64_t>(ball.size()) / 2;
  if (half < 1)
    return out;

  const SetSystem sys = induced_system(g, ball);
  if (ball.size() <= 20) {
    out.profile = brute_force(sys, static_cast<int>(ball.size()), static_cast<int>(half));
    return out;
  }

  Best best;
  Xoshiro256 rng(derive_seed(seed, 0xba11ULL));
  for (int start = 0; start < static_cast<int>(ball.size()); ++start) {
    SetState state(sys);
    state.add(start);
    run_greedy(sys, state, half, best);
  }
  SetState state(sys);
  state.add(static_cast<int>(rng.below(ball.size())));
  run_anneal(sys, state, half, 20000, rng, best);
  out.profile = make_result(sys, best.set, best.boundary, false);
  return out;
}

} // namespace liouville
