#pragma once

// Influence graphs: storage, the line-oriented text format, structural class
// recognition, boundaries and seeded instance generators.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imgap/common.hpp"

namespace imgap {

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double prob = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed graph with a per-edge activation probability. Immutable once
/// built. Undirected graphs are stored as two opposite directed edges placed
/// next to each other; `is_directed()` only records the input form.
class InfluenceGraph {
 public:
  InfluenceGraph() = default;

  InfluenceGraph(std::size_t n, std::vector<Edge> edges, bool directed = true)
      : n_(n), edges_(std::move(edges)), directed_(directed) {
    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.src >= n_ || e.dst >= n_) {
        throw InvalidArgument("edge " + std::to_string(i) + " (" + std::to_string(e.src) + "," +
                              std::to_string(e.dst) + ") references a node outside 0.." +
                              std::to_string(n_ == 0 ? 0 : n_ - 1));
      }
      if (e.src == e.dst) throw InvalidArgument("self-loop on node " + std::to_string(e.src));
      if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
        throw InvalidArgument("probability of edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                              ") is outside [0,1]");
      }
      if (!seen.emplace(e.src, e.dst).second) {
        throw InvalidArgument("duplicate edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) + ")");
      }
    }
    if (!directed_) {
      for (const Edge& e : edges_) {
        if (!seen.contains({e.dst, e.src})) {
          throw InvalidArgument("undirected graph is missing edge (" + std::to_string(e.dst) + "," +
                                std::to_string(e.src) + ")");
        }
      }
    }
    out_offsets_.assign(n_ + 1, 0);
    in_offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++out_offsets_[e.src + 1];
      ++in_offsets_[e.dst + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    out_index_.resize(edges_.size());
    in_index_.resize(edges_.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      out_index_[out_fill[edges_[i].src]++] = i;
      in_index_[in_fill[edges_[i].dst]++] = i;
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return edges_.size(); }
  bool is_directed() const noexcept { return directed_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }

  /// Indices of edges leaving u, in edge order.
  std::span<const std::size_t> out_edges(NodeId u) const {
    return {out_index_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
  }
  std::span<const std::size_t> in_edges(NodeId v) const {
    return {in_index_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }

  std::optional<std::size_t> find_edge(NodeId u, NodeId v) const {
    if (u >= n_) return std::nullopt;
    for (std::size_t i : out_edges(u)) {
      if (edges_[i].dst == v) return i;
    }
    return std::nullopt;
  }

  /// True iff every edge (u,v) has its reverse (v,u).
  bool is_symmetric() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [&](const Edge& e) { return find_edge(e.dst, e.src).has_value(); });
  }

  /// Neighbors of v in the undirected view (in- and out-neighbors merged).
  NodeSet neighbors(NodeId v) const {
    NodeSet out;
    for (std::size_t i : out_edges(v)) out.push_back(edges_[i].dst);
    for (std::size_t i : in_edges(v)) out.push_back(edges_[i].src);
    return normalized(std::move(out));
  }

  void check_node(NodeId v) const {
    if (v >= n_) throw InvalidArgument("node " + std::to_string(v) + " is out of range for n=" + std::to_string(n_));
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  bool directed_ = true;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<std::size_t> in_offsets_{0};
  std::vector<std::size_t> out_index_;
  std::vector<std::size_t> in_index_;
};

struct UndirectedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double p_uv = 0.0;
  double p_vu = 0.0;
};

/// Expands each undirected edge {u,v} into (u,v) and (v,u).
inline InfluenceGraph make_undirected(std::size_t n, const std::vector<UndirectedEdge>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    edges.push_back({p.u, p.v, p.p_uv});
    edges.push_back({p.v, p.u, p.p_vu});
  }
  return InfluenceGraph(n, std::move(edges), /*directed=*/false);
}

// ---- text format -----------------------------------------------------------
//
//   directed | undirected
//   <n>
//   u v p            (directed)
//   u v p_uv [p_vu]  (undirected; p_vu defaults to p_uv)
//
// '#' starts a comment; blank lines are ignored.

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline NodeId parse_node(const std::string& tok, std::size_t n, std::size_t line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a node id, got '" + tok + "'");
  }
  if (used != tok.size() || tok.front() == '-') throw ParseError(line, "expected a node id, got '" + tok + "'");
  if (v >= n) throw ParseError(line, "node id " + tok + " is out of range for n=" + std::to_string(n));
  return static_cast<NodeId>(v);
}

inline double parse_prob(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double p = 0;
  try {
    p = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a probability, got '" + tok + "'");
  }
  if (used != tok.size()) throw ParseError(line, "expected a probability, got '" + tok + "'");
  if (!(p >= 0.0 && p <= 1.0)) throw ParseError(line, "probability " + tok + " is outside [0,1]");
  return p;
}

inline std::string format_prob(double p) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << p;
  return os.str();
}

}  // namespace detail

inline InfluenceGraph parse_graph(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<bool> directed;
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  std::set<std::pair<NodeId, NodeId>> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view view = raw;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;

    std::istringstream fields{std::string(view)};
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);

    if (!directed) {
      if (tok.size() == 1 && tok[0] == "directed") {
        directed = true;
      } else if (tok.size() == 1 && tok[0] == "undirected") {
        directed = false;
      } else {
        throw ParseError(line_no, "expected 'directed' or 'undirected'");
      }
      continue;
    }
    if (!n) {
      std::size_t used = 0;
      try {
        if (tok.size() != 1 || tok[0].front() == '-') throw std::invalid_argument("n");
        n = std::stoull(tok[0], &used);
      } catch (const std::exception&) {
        throw ParseError(line_no, "expected the node count");
      }
      if (used != tok[0].size()) throw ParseError(line_no, "expected the node count");
      continue;
    }

    const std::size_t max_fields = *directed ? 3 : 4;
    if (tok.size() < 3 || tok.size() > max_fields) {
      throw ParseError(line_no, *directed ? "expected 'u v p'" : "expected 'u v p_uv [p_vu]'");
    }
    const NodeId u = detail::parse_node(tok[0], *n, line_no);
    const NodeId v = detail::parse_node(tok[1], *n, line_no);
    const double p = detail::parse_prob(tok[2], line_no);
    if (u == v) throw ParseError(line_no, "self-loop on node " + tok[0]);
    if (*directed) {
      if (!seen.emplace(u, v).second) throw ParseError(line_no, "duplicate edge (" + tok[0] + "," + tok[1] + ")");
      edges.push_back({u, v, p});
    } else {
      const double q = tok.size() == 4 ? detail::parse_prob(tok[3], line_no) : p;
      if (!seen.emplace(std::min(u, v), std::max(u, v)).second) {
        throw ParseError(line_no, "duplicate edge {" + tok[0] + "," + tok[1] + "}");
      }
      edges.push_back({u, v, p});
      edges.push_back({v, u, q});
    }
  }
  if (!directed) throw ParseError(line_no + 1, "missing 'directed' / 'undirected' header");
  if (!n) throw ParseError(line_no + 1, "missing node count");
  return InfluenceGraph(*n, std::move(edges), *directed);
}

inline InfluenceGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

inline InfluenceGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  return parse_graph(in);
}

inline std::string format_graph(const InfluenceGraph& g) {
  std::ostringstream os;
  os << (g.is_directed() ? "directed" : "undirected") << '\n' << g.n() << '\n';
  if (g.is_directed()) {
    for (const Edge& e : g.edges()) os << e.src << ' ' << e.dst << ' ' << detail::format_prob(e.prob) << '\n';
  } else {
    for (std::size_t i = 0; i < g.m(); ++i) {
      const Edge& e = g.edge(i);
      const std::size_t rev = *g.find_edge(e.dst, e.src);
      if (rev < i) continue;
      os << e.src << ' ' << e.dst << ' ' << detail::format_prob(e.prob) << ' '
         << detail::format_prob(g.edge(rev).prob) << '\n';
    }
  }
  return os.str();
}

inline void save_graph(const InfluenceGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write graph file '" + path + "'");
  out << format_graph(g);
}

// ---- classification --------------------------------------------------------

struct GraphClassReport {
  bool is_in_arborescence = false;
  bool is_out_arborescence = false;
  bool is_one_directional_bipartite = false;
  bool is_symmetric = false;
  /// Sum of undirected degrees above two; empty when the edge set is not symmetric.
  std::optional<std::uint64_t> min_alpha;
  bool is_zero_bounded = false;
};

namespace detail {

// Every node but one has exactly one edge in `forward` direction, and
// following those edges from any node ends at the remaining node.
inline bool is_arborescence(const InfluenceGraph& g, bool toward_root) {
  const std::size_t n = g.n();
  if (n == 0 || g.m() != n - 1) return false;
  std::vector<std::optional<NodeId>> parent(n);
  std::size_t roots = 0;
  for (NodeId v = 0; v < n; ++v) {
    const auto edges = toward_root ? g.out_edges(v) : g.in_edges(v);
    if (edges.size() > 1) return false;
    if (edges.empty()) {
      ++roots;
    } else {
      const Edge& e = g.edge(edges[0]);
      parent[v] = toward_root ? e.dst : e.src;
    }
  }
  if (roots != 1) return false;
  for (NodeId v = 0; v < n; ++v) {
    NodeId cur = v;
    std::size_t steps = 0;
    while (parent[cur]) {
      cur = *parent[cur];
      if (++steps > n) return false;
    }
  }
  return true;
}

}  // namespace detail

inline GraphClassReport classify(const InfluenceGraph& g) {
  GraphClassReport r;
  r.is_in_arborescence = detail::is_arborescence(g, /*toward_root=*/true);
  r.is_out_arborescence = detail::is_arborescence(g, /*toward_root=*/false);
  r.is_one_directional_bipartite = true;
  for (NodeId v = 0; v < g.n(); ++v) {
    if (!g.in_edges(v).empty() && !g.out_edges(v).empty()) {
      r.is_one_directional_bipartite = false;
      break;
    }
  }
  r.is_symmetric = g.is_symmetric();
  if (r.is_symmetric) {
    std::uint64_t alpha = 0;
    for (NodeId v = 0; v < g.n(); ++v) {
      const std::size_t deg = g.out_edges(v).size();
      if (deg > 2) alpha += deg;
    }
    r.min_alpha = alpha;
  }
  r.is_zero_bounded = r.min_alpha == std::uint64_t{0};
  return r;
}

/// Short label of the most specific class, used in reports and filters.
inline std::string class_label(const GraphClassReport& r) {
  if (r.is_in_arborescence) return "in_arborescence";
  if (r.is_out_arborescence) return "out_arborescence";
  if (r.is_zero_bounded) return "zero_bounded";
  if (r.min_alpha) return "alpha_bounded";
  if (r.is_one_directional_bipartite) return "one_directional_bipartite";
  return "general";
}

// ---- boundary and components -----------------------------------------------

/// Nodes of U having at least one out-edge to a node outside U.
inline NodeMask boundary_mask(const InfluenceGraph& g, NodeMask u) {
  NodeMask out = 0;
  for (const Edge& e : g.edges()) {
    if (contains(u, e.src) && !contains(u, e.dst)) out |= bit(e.src);
  }
  return out;
}

inline NodeSet boundary(const InfluenceGraph& g, const NodeSet& u) {
  std::vector<char> in_u(g.n(), 0);
  for (NodeId v : u) {
    g.check_node(v);
    in_u[v] = 1;
  }
  NodeSet out;
  for (const Edge& e : g.edges()) {
    if (in_u[e.src] && !in_u[e.dst]) out.push_back(e.src);
  }
  return normalized(std::move(out));
}

/// Number of connected components of the subgraph induced by U in the
/// undirected view of g.
inline std::size_t component_count(const InfluenceGraph& g, NodeMask u) {
  std::size_t comps = 0;
  NodeMask left = u;
  while (left) {
    ++comps;
    NodeMask frontier = left & (~left + 1);
    left &= ~frontier;
    while (frontier) {
      const auto v = static_cast<NodeId>(std::countr_zero(frontier));
      frontier &= frontier - 1;
      for (NodeId w : g.neighbors(v)) {
        if (contains(left, w)) {
          left &= ~bit(w);
          frontier |= bit(w);
        }
      }
    }
  }
  return comps;
}

// ---- generators ------------------------------------------------------------

enum class Family {
  in_arborescence,
  out_arborescence,
  path,
  cycle,
  one_directional_bipartite,
  star_subdivision,
  parallel_links,
  random_digraph,
};

inline std::string family_name(Family f) {
  switch (f) {
    case Family::in_arborescence: return "in_arborescence";
    case Family::out_arborescence: return "out_arborescence";
    case Family::path: return "path";
    case Family::cycle: return "cycle";
    case Family::one_directional_bipartite: return "one_directional_bipartite";
    case Family::star_subdivision: return "star_subdivision";
    case Family::parallel_links: return "parallel_links";
    case Family::random_digraph: return "random_digraph";
  }
  return "unknown";
}

inline std::optional<Family> parse_family(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "in_arborescence" || name == "in_arb") return Family::in_arborescence;
  if (name == "out_arborescence" || name == "out_arb") return Family::out_arborescence;
  if (name == "path") return Family::path;
  if (name == "cycle") return Family::cycle;
  if (name == "one_directional_bipartite" || name == "bipartite") return Family::one_directional_bipartite;
  if (name == "star_subdivision" || name == "star") return Family::star_subdivision;
  if (name == "parallel_links" || name == "parallel") return Family::parallel_links;
  if (name == "random_digraph" || name == "random") return Family::random_digraph;
  return std::nullopt;
}

/// Constant probability when lo == hi, otherwise i.i.d. uniform on [lo, hi].
struct ProbabilityRule {
  double lo = 0.5;
  double hi = 0.5;

  static ProbabilityRule constant(double p) { return {p, p}; }
  static ProbabilityRule uniform(double lo, double hi) { return {lo, hi}; }

  bool is_constant() const { return lo == hi; }
  double draw(Rng& rng) const { return is_constant() ? lo : lo + (hi - lo) * uniform01(rng); }
};

struct GeneratorSpec {
  Family family = Family::path;
  /// Main size: n, or h for star/parallel families, or a for bipartite.
  std::size_t a = 0;
  /// Second size: arm length, path length, b for bipartite, m for random.
  std::size_t b = 0;
  /// Only path and cycle come in both orientations.
  bool directed = false;
  ProbabilityRule probs;
};

inline InfluenceGraph generate(const GeneratorSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const ProbabilityRule& pr = spec.probs;
  if (!(pr.lo >= 0.0 && pr.hi <= 1.0 && pr.lo <= pr.hi)) throw InvalidArgument("probability interval must lie in [0,1]");

  std::vector<UndirectedEdge> pairs;
  auto link = [&](std::size_t u, std::size_t v) {
    const double p_uv = pr.draw(rng);
    const double p_vu = pr.draw(rng);
    pairs.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), p_uv, p_vu});
  };

  std::vector<Edge> edges;
  auto arc = [&](std::size_t u, std::size_t v) {
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), pr.draw(rng)});
  };

  switch (spec.family) {
    case Family::in_arborescence:
    case Family::out_arborescence: {
      const std::size_t n = spec.a;
      if (n < 1) throw InvalidArgument("arborescence needs at least one node");
      for (std::size_t v = 1; v < n; ++v) {
        const std::size_t parent = uniform_int(rng, 0, v - 1);
        if (spec.family == Family::in_arborescence) {
          arc(v, parent);
        } else {
          arc(parent, v);
        }
      }
      return InfluenceGraph(n, std::move(edges));
    }
    case Family::path:
    case Family::cycle: {
      const std::size_t n = spec.a;
      const bool cycle = spec.family == Family::cycle;
      if (n < 1) throw InvalidArgument("path needs at least one node");
      if (cycle && n < 3) throw InvalidArgument("cycle needs at least 3 nodes, got " + std::to_string(n));
      const std::size_t links = cycle ? n : n - 1;
      for (std::size_t i = 0; i < links; ++i) {
        if (spec.directed) {
          arc(i, (i + 1) % n);
        } else {
          link(i, (i + 1) % n);
        }
      }
      return spec.directed ? InfluenceGraph(n, std::move(edges)) : make_undirected(n, pairs);
    }
    case Family::one_directional_bipartite: {
      if (spec.a < 1 || spec.b < 1) throw InvalidArgument("bipartite graph needs two nonempty sides");
      for (std::size_t u = 0; u < spec.a; ++u) {
        for (std::size_t v = 0; v < spec.b; ++v) arc(u, spec.a + v);
      }
      return InfluenceGraph(spec.a + spec.b, std::move(edges));
    }
    case Family::star_subdivision: {
      const std::size_t h = spec.a;
      const std::size_t len = spec.b;
      if (h < 1 || len < 1) throw InvalidArgument("star needs at least one arm of positive length");
      for (std::size_t arm = 0; arm < h; ++arm) {
        std::size_t prev = 0;
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t cur = 1 + arm * len + i;
          link(prev, cur);
          prev = cur;
        }
      }
      return make_undirected(1 + h * len, pairs);
    }
    case Family::parallel_links: {
      const std::size_t h = spec.a;
      const std::size_t len = spec.b;
      if (h < 1 || len < 1) throw InvalidArgument("parallel links need at least one link with an internal node");
      for (std::size_t j = 0; j < h; ++j) {
        std::size_t prev = 0;
        for (std::size_t i = 0; i < len; ++i) {
          const std::size_t cur = 2 + j * len + i;
          link(prev, cur);
          prev = cur;
        }
        link(prev, 1);
      }
      return make_undirected(2 + h * len, pairs);
    }
    case Family::random_digraph: {
      const std::size_t n = spec.a;
      const std::size_t m = spec.b;
      if (n < 1) throw InvalidArgument("random digraph needs at least one node");
      if (m > n * (n - 1)) {
        throw InvalidArgument("random digraph on " + std::to_string(n) + " nodes has at most " +
                              std::to_string(n * (n - 1)) + " edges");
      }
      std::vector<std::pair<std::size_t, std::size_t>> all;
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
          if (u != v) all.emplace_back(u, v);
        }
      }
      // partial Fisher-Yates
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + uniform_int(rng, 0, all.size() - 1 - i);
        std::swap(all[i], all[j]);
      }
      all.resize(m);
      std::sort(all.begin(), all.end());
      for (auto [u, v] : all) arc(u, v);
      return InfluenceGraph(n, std::move(edges));
    }
  }
  throw InvalidArgument("unknown generator family");
}

}  // namespace imgap
