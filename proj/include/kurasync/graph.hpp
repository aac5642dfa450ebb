#pragma once

// Undirected simple graphs, deterministic generators and exact edge counting.
//
// Edge counting convention: edges_between(g, X, Y) is the double sum
//   e(X, Y) = sum_{x in X} sum_{y in Y} A[x][y],
// so an edge with both endpoints in X contributes 2 to e(X, X). This is NOT
// the usual "number of edges inside X"; the mixing-lemma bounds in
// spectral.hpp are stated in this convention.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kurasync/errors.hpp"
#include "kurasync/rng.hpp"

namespace kurasync {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an unordered edge list. Duplicate pairs (in either
  /// orientation) are merged.
  static Graph from_edge_list(std::size_t n, std::span<const Edge> edges) {
    if (n == 0) throw InputError("graph must have at least one vertex");
    Graph g;
    g.adjacency_.assign(n, {});
    for (const auto& [u, v] : edges) {
      if (u >= n || v >= n) {
        throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                         ") has an endpoint outside [0, " + std::to_string(n) + ")");
      }
      if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
      g.adjacency_[u].push_back(v);
      g.adjacency_[v].push_back(u);
    }
    for (auto& nbrs : g.adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      g.num_edges_ += nbrs.size();
    }
    g.num_edges_ /= 2;
    return g;
  }

  static Graph from_edge_list(std::size_t n, const std::vector<Edge>& edges) {
    return from_edge_list(n, std::span<const Edge>(edges));
  }

  std::size_t num_vertices() const noexcept { return adjacency_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }

  std::span<const Vertex> neighbors(Vertex x) const { return adjacency_.at(x); }
  std::size_t degree(Vertex x) const { return adjacency_.at(x).size(); }

  bool has_edge(Vertex x, Vertex y) const {
    const auto& nbrs = adjacency_.at(x);
    return std::binary_search(nbrs.begin(), nbrs.end(), y);
  }

  /// 2|E|/n, the default reference degree for measured graphs.
  double average_degree() const {
    return 2.0 * static_cast<double>(num_edges_) / static_cast<double>(num_vertices());
  }

  /// Edges as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges_);
    for (Vertex u = 0; u < adjacency_.size(); ++u) {
      for (Vertex v : adjacency_[u]) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  bool is_connected() const {
    const std::size_t n = num_vertices();
    std::vector<char> seen(n, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (Vertex y : adjacency_[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == n;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::size_t num_edges_ = 0;
};

/// A subset of [0, n).
class VertexSet {
 public:
  VertexSet() = default;

  VertexSet(std::size_t universe, std::vector<Vertex> members)
      : universe_(universe), mask_(universe, 0) {
    for (Vertex v : members) {
      if (v >= universe) {
        throw InputError("vertex " + std::to_string(v) + " outside [0, " +
                         std::to_string(universe) + ")");
      }
      mask_[v] = 1;
    }
    for (Vertex v = 0; v < universe; ++v) {
      if (mask_[v]) members_.push_back(v);
    }
  }

  static VertexSet empty(std::size_t universe) { return VertexSet(universe, {}); }

  static VertexSet all(std::size_t universe) {
    std::vector<Vertex> m(universe);
    for (Vertex v = 0; v < universe; ++v) m[v] = v;
    return VertexSet(universe, std::move(m));
  }

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(Vertex v) const { return v < universe_ && mask_[v] != 0; }
  std::span<const Vertex> members() const noexcept { return members_; }

  VertexSet complement() const {
    std::vector<Vertex> out;
    out.reserve(universe_ - members_.size());
    for (Vertex v = 0; v < universe_; ++v) {
      if (!mask_[v]) out.push_back(v);
    }
    return VertexSet(universe_, std::move(out));
  }

  bool is_subset_of(const VertexSet& other) const {
    return std::all_of(members_.begin(), members_.end(),
                       [&](Vertex v) { return other.contains(v); });
  }

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.universe_ == b.universe_ && a.members_ == b.members_;
  }

 private:
  std::size_t universe_ = 0;
  std::vector<char> mask_;
  std::vector<Vertex> members_;
};

/// e(X, Y) in the double-sum convention (see file comment).
inline std::uint64_t edges_between(const Graph& g, const VertexSet& x, const VertexSet& y) {
  if (x.universe() != g.num_vertices() || y.universe() != g.num_vertices()) {
    throw InputError("vertex set universe does not match graph size");
  }
  std::uint64_t count = 0;
  for (Vertex u : x.members()) {
    for (Vertex v : g.neighbors(u)) {
      if (y.contains(v)) ++count;
    }
  }
  return count;
}

struct DegreeExtrema {
  std::size_t min = 0;
  std::size_t max = 0;
};

inline DegreeExtrema degree_extrema(const Graph& g) {
  DegreeExtrema out{g.degree(0), g.degree(0)};
  for (Vertex x = 1; x < g.num_vertices(); ++x) {
    out.min = std::min(out.min, g.degree(x));
    out.max = std::max(out.max, g.degree(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

enum class NamedFamily { cycle, path, complete, star, two_cliques_bridged };

inline std::string_view to_string(NamedFamily f) {
  switch (f) {
    case NamedFamily::cycle: return "cycle";
    case NamedFamily::path: return "path";
    case NamedFamily::complete: return "complete";
    case NamedFamily::star: return "star";
    case NamedFamily::two_cliques_bridged: return "two_cliques_bridged";
  }
  return "?";
}

inline NamedFamily parse_named_family(std::string_view s) {
  for (auto f : {NamedFamily::cycle, NamedFamily::path, NamedFamily::complete, NamedFamily::star,
                 NamedFamily::two_cliques_bridged}) {
    if (s == to_string(f)) return f;
  }
  throw InputError("unknown graph family '" + std::string(s) + "'");
}

/// Canonically labelled members of the small named families. Stars are
/// centred at vertex 0; two_cliques_bridged joins cliques on [0, n/2) and
/// [n/2, n) by the edge (n/2 - 1, n/2).
inline Graph gen_named(NamedFamily family, std::size_t n) {
  std::vector<Edge> edges;
  switch (family) {
    case NamedFamily::cycle:
      if (n < 3) throw InputError("cycle needs n >= 3");
      for (Vertex i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      break;
    case NamedFamily::path:
      if (n < 1) throw InputError("path needs n >= 1");
      for (Vertex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case NamedFamily::complete:
      if (n < 1) throw InputError("complete graph needs n >= 1");
      for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      }
      break;
    case NamedFamily::star:
      if (n < 1) throw InputError("star needs n >= 1");
      for (Vertex i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case NamedFamily::two_cliques_bridged: {
      if (n < 4 || n % 2 != 0) throw InputError("two_cliques_bridged needs even n >= 4");
      const std::size_t h = n / 2;
      for (Vertex i = 0; i < h; ++i) {
        for (Vertex j = i + 1; j < h; ++j) {
          edges.emplace_back(i, j);
          edges.emplace_back(h + i, h + j);
        }
      }
      edges.emplace_back(h - 1, h);
      break;
    }
  }
  return Graph::from_edge_list(n, edges);
}

/// G(n, p). Pairs are visited in lexicographic order and skipped with
/// geometric gaps, which is distributionally identical to one Bernoulli(p)
/// trial per pair.
inline Graph gen_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  if (n == 0) throw InputError("graph must have at least one vertex");
  std::vector<Edge> edges;
  if (p == 1.0) return gen_named(NamedFamily::complete, n);
  if (p > 0.0 && n > 1) {
    Rng rng(seed);
    const double log_q = std::log1p(-p);
    // Batagelj-Brandes: walk the strictly lower triangle row by row.
    std::int64_t v = 1;
    std::int64_t w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
      const double r = rng.uniform_open_closed();
      const double skip = std::floor(std::log(r) / log_q);
      // Large skips can exceed the remaining pair count; clamp before the cast.
      w += 1 + static_cast<std::int64_t>(std::min(skip, 4.0 * static_cast<double>(nn) * nn));
      while (w >= v && v < nn) {
        w -= v;
        ++v;
      }
      if (v < nn) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
    }
  }
  return Graph::from_edge_list(n, edges);
}

inline constexpr int kRegularRestartCap = 10'000;

/// Uniform-ish simple d-regular graph via the pairing model: stubs are
/// shuffled and paired, unsuitable pairs (loops, repeated edges) are returned
/// to the pool and re-paired, and the whole attempt restarts only when no
/// suitable pair remains among the leftover stubs.
inline Graph gen_random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if ((n * d) % 2 != 0) throw InputError("n*d must be even for a d-regular graph");
  if (d >= n) throw InputError("degree must be smaller than n");
  if (d == 0) return Graph::from_edge_list(n, std::vector<Edge>{});
  Rng rng(seed);

  auto suitable = [&](const std::set<Edge>& edges, const std::map<Vertex, std::size_t>& pending) {
    if (pending.empty()) return true;
    for (auto a = pending.begin(); a != pending.end(); ++a) {
      for (auto b = std::next(a); b != pending.end(); ++b) {
        if (!edges.contains({a->first, b->first})) return true;
      }
    }
    return false;
  };

  for (int attempt = 0; attempt < kRegularRestartCap; ++attempt) {
    std::set<Edge> edges;
    std::vector<Vertex> stubs;
    stubs.reserve(n * d);
    for (std::size_t k = 0; k < d; ++k) {
      for (Vertex v = 0; v < n; ++v) stubs.push_back(v);
    }
    bool ok = true;
    while (!stubs.empty()) {
      std::map<Vertex, std::size_t> pending;
      rng.shuffle(std::span<Vertex>(stubs));
      for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
        Vertex a = stubs[i];
        Vertex b = stubs[i + 1];
        if (a > b) std::swap(a, b);
        if (a != b && !edges.contains({a, b})) {
          edges.insert({a, b});
        } else {
          ++pending[a];
          ++pending[b];
        }
      }
      if (!suitable(edges, pending)) {
        ok = false;
        break;
      }
      stubs.clear();
      for (const auto& [v, count] : pending) {
        for (std::size_t k = 0; k < count; ++k) stubs.push_back(v);
      }
    }
    if (ok) {
      std::vector<Edge> list(edges.begin(), edges.end());
      return Graph::from_edge_list(n, list);
    }
  }
  throw GenerationError("random regular generator exhausted " +
                        std::to_string(kRegularRestartCap) + " restarts");
}

// ---------------------------------------------------------------------------
// Edge-list text format: "n m" then m lines "u v" with u < v.

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline Graph read_edge_list(std::istream& in) {
  auto read_line = [&](std::string& line, const char* what) {
    if (!std::getline(in, line)) throw InputError(std::string("edge list: missing ") + what);
  };
  auto parse_two = [](const std::string& line, long long& a, long long& b) {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra)) return false;
    return true;
  };

  std::string line;
  read_line(line, "header");
  long long n = 0, m = 0;
  if (!parse_two(line, n, m) || n <= 0 || m < 0) {
    throw InputError("edge list: header must be 'n m' with n >= 1, m >= 0");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  std::set<Edge> seen;
  for (long long i = 0; i < m; ++i) {
    read_line(line, "edge line");
    long long u = 0, v = 0;
    if (!parse_two(line, u, v)) {
      throw InputError("edge list: line " + std::to_string(i + 2) + " is not 'u v'");
    }
    if (u < 0 || v >= n || u >= v) {
      throw InputError("edge list: line " + std::to_string(i + 2) +
                       " violates 0 <= u < v < n");
    }
    Edge e{static_cast<Vertex>(u), static_cast<Vertex>(v)};
    if (!seen.insert(e).second) {
      throw InputError("edge list: duplicate edge on line " + std::to_string(i + 2));
    }
    edges.push_back(e);
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw InputError("edge list: more edge lines than the header declares");
    }
  }
  return Graph::from_edge_list(static_cast<std::size_t>(n), edges);
}

}  // namespace kurasync
