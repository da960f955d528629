#pragma once

// Independent-cascade diffusion through live-edge graphs: sampling, full
// enumeration, reachability, exact and Monte Carlo expected spread.

#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "imgap/common.hpp"
#include "imgap/graph.hpp"
#include "imgap/parallel.hpp"

namespace imgap {

/// One outcome of all edge coin flips.
struct LiveEdgeGraph {
  std::vector<bool> live;  // indexed like InfluenceGraph::edges()
  double weight = 1.0;     // probability of exactly this outcome
};

inline double live_weight(const InfluenceGraph& g, const std::vector<bool>& live) {
  double w = 1.0;
  for (std::size_t e = 0; e < g.m(); ++e) w *= live[e] ? g.edge(e).prob : 1.0 - g.edge(e).prob;
  return w;
}

inline LiveEdgeGraph sample_live(const InfluenceGraph& g, Rng& rng) {
  LiveEdgeGraph l;
  l.live.resize(g.m());
  for (std::size_t e = 0; e < g.m(); ++e) l.live[e] = uniform01(rng) < g.edge(e).prob;
  l.weight = live_weight(g, l.live);
  return l;
}

inline void check_enumerable(const InfluenceGraph& g, std::size_t max_edges) {
  if (g.m() > max_edges) {
    throw CapExceeded("graph has " + std::to_string(g.m()) + " edges; exact enumeration is capped at " +
                      std::to_string(max_edges) + " (2^" + std::to_string(g.m()) + " live-edge graphs)");
  }
  if (g.m() >= 63) throw CapExceeded("exact enumeration needs fewer than 63 edges");
}

/// Live-edge graph number `index`: edge e is live iff bit e of index is set.
inline LiveEdgeGraph live_graph_at(const InfluenceGraph& g, std::uint64_t index) {
  LiveEdgeGraph l;
  l.live.resize(g.m());
  for (std::size_t e = 0; e < g.m(); ++e) l.live[e] = (index >> e) & 1U;
  l.weight = live_weight(g, l.live);
  return l;
}

/// All 2^m live-edge graphs in increasing binary order of the live mask.
inline std::vector<LiveEdgeGraph> enumerate_live(const InfluenceGraph& g, std::size_t max_edges = kDefaultMaxEdges) {
  check_enumerable(g, max_edges);
  std::vector<LiveEdgeGraph> out;
  const std::uint64_t total = std::uint64_t{1} << g.m();
  out.reserve(total);
  for (std::uint64_t i = 0; i < total; ++i) out.push_back(live_graph_at(g, i));
  return out;
}

/// Forward closure of S over the live edges of L.
inline NodeSet reach(const InfluenceGraph& g, const NodeSet& seeds, const LiveEdgeGraph& l) {
  std::vector<char> seen(g.n(), 0);
  std::deque<NodeId> queue;
  for (NodeId s : seeds) {
    g.check_node(s);
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (std::size_t e : g.out_edges(u)) {
      const NodeId v = g.edge(e).dst;
      if (l.live[e] && !seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  NodeSet out;
  for (NodeId v = 0; v < g.n(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

/// Exact view of the live-edge distribution: every live-edge graph's weight
/// and the reach set of every single node in it, as bitmasks. Requires n <= 64
/// and m <= max_edges. Memory is 2^m * (n + 1) words.
class LiveEdgeEnumeration {
 public:
  explicit LiveEdgeEnumeration(InfluenceGraph g, std::size_t max_edges = kDefaultMaxEdges) : g_(std::move(g)) {
    check_enumerable(g_, max_edges);
    if (g_.n() > kMaxMaskNodes) {
      throw CapExceeded("exact oracles support at most 64 nodes, graph has " + std::to_string(g_.n()));
    }
    n_ = g_.n();
    const std::uint64_t total = std::uint64_t{1} << g_.m();
    weights_.resize(total);
    reach_.resize(total * n_);

    std::vector<NodeMask> out_live(n_);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      double w = 1.0;
      std::fill(out_live.begin(), out_live.end(), 0);
      for (std::size_t e = 0; e < g_.m(); ++e) {
        const Edge& edge = g_.edge(e);
        if ((idx >> e) & 1U) {
          w *= edge.prob;
          out_live[edge.src] |= bit(edge.dst);
        } else {
          w *= 1.0 - edge.prob;
        }
      }
      weights_[idx] = w;
      for (NodeId v = 0; v < n_; ++v) {
        NodeMask seen = bit(v);
        NodeMask frontier = seen;
        while (frontier) {
          NodeMask next = 0;
          for (NodeMask f = frontier; f; f &= f - 1) next |= out_live[std::countr_zero(f)];
          frontier = next & ~seen;
          seen |= next;
        }
        reach_[idx * n_ + v] = seen;
      }
    }
  }

  const InfluenceGraph& graph() const noexcept { return g_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t idx) const { return weights_[idx]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  NodeMask reach(std::size_t idx, NodeId v) const { return reach_[idx * n_ + v]; }

  NodeMask reach(std::size_t idx, NodeMask seeds) const {
    NodeMask out = 0;
    for (; seeds; seeds &= seeds - 1) out |= reach_[idx * n_ + std::countr_zero(seeds)];
    return out;
  }

  LiveEdgeGraph live_graph(std::size_t idx) const { return live_graph_at(g_, idx); }

  /// sigma(S) = sum_L weight(L) * |R(S,L)|, summed in index order.
  double spread(NodeMask seeds) const {
    if (seeds == 0) return 0.0;
    double s = 0.0;
    for (std::size_t idx = 0; idx < size(); ++idx) s += weights_[idx] * static_cast<double>(count(reach(idx, seeds)));
    return s;
  }

 private:
  InfluenceGraph g_;
  std::size_t n_ = 0;
  std::vector<double> weights_;
  std::vector<NodeMask> reach_;
};

inline double spread_exact(const InfluenceGraph& g, const NodeSet& seeds, std::size_t max_edges = kDefaultMaxEdges) {
  for (NodeId s : seeds) g.check_node(s);
  check_enumerable(g, max_edges);
  const std::uint64_t total = std::uint64_t{1} << g.m();
  double s = 0.0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    const LiveEdgeGraph l = live_graph_at(g, idx);
    s += l.weight * static_cast<double>(reach(g, seeds, l).size());
  }
  return s;
}

struct SpreadEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

inline constexpr std::uint64_t kMonteCarloChunk = 1024;

/// Monte Carlo estimate of sigma(S). Samples are cut into fixed chunks, chunk
/// c draws from substream derive_seed(seed, c), and integer tallies are summed
/// in chunk order, so the result does not depend on `workers`.
inline SpreadEstimate spread_mc(const InfluenceGraph& g, const NodeSet& seeds, std::uint64_t samples,
                                std::uint64_t seed, std::size_t workers = 1) {
  if (samples < 1) throw InvalidArgument("Monte Carlo needs at least one sample");
  for (NodeId s : seeds) g.check_node(s);
  struct Tally {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;
  };
  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  const auto tallies = parallel_map(chunks, workers, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    const std::uint64_t begin = c * kMonteCarloChunk;
    const std::uint64_t end = std::min(samples, begin + kMonteCarloChunk);
    Tally t;
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::uint64_t r = reach(g, seeds, sample_live(g, rng)).size();
      t.sum += r;
      t.sum_sq += r * r;
    }
    return t;
  });
  Tally total;
  for (const Tally& t : tallies) {
    total.sum += t.sum;
    total.sum_sq += t.sum_sq;
  }
  const auto n = static_cast<double>(samples);
  SpreadEstimate est;
  est.samples = samples;
  est.mean = static_cast<double>(total.sum) / n;
  if (samples > 1) {
    const double var = (static_cast<double>(total.sum_sq) - n * est.mean * est.mean) / (n - 1.0);
    est.std_error = std::sqrt(std::max(0.0, var) / n);
  }
  return est;
}

/// Activation layers A_0 = S, A_1, ... of one diffusion run, plus the
/// live-edge graph that produced them.
struct DiffusionTrace {
  std::vector<NodeSet> layers;
  LiveEdgeGraph live;
};

inline std::vector<NodeSet> diffusion_layers(const InfluenceGraph& g, const NodeSet& seeds, const LiveEdgeGraph& l) {
  std::vector<char> active(g.n(), 0);
  NodeSet current = normalized(seeds);
  for (NodeId s : current) {
    g.check_node(s);
    active[s] = 1;
  }
  std::vector<NodeSet> layers;
  while (!current.empty()) {
    NodeSet next;
    for (NodeId u : current) {
      for (std::size_t e : g.out_edges(u)) {
        const NodeId v = g.edge(e).dst;
        if (l.live[e] && !active[v]) {
          active[v] = 1;
          next.push_back(v);
        }
      }
    }
    layers.push_back(std::move(current));
    current = normalized(std::move(next));
  }
  return layers;
}

inline DiffusionTrace simulate_rounds(const InfluenceGraph& g, const NodeSet& seeds, Rng& rng) {
  if (seeds.empty()) throw InvalidArgument("diffusion needs at least one seed");
  DiffusionTrace t;
  t.live = sample_live(g, rng);
  t.layers = diffusion_layers(g, seeds, t.live);
  return t;
}

}  // namespace imgap
