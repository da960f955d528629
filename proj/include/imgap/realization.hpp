#pragma once

// Full-adoption feedback: realizations, partial realizations, conditioning on
// observed cascades, and the expected marginal gain of a seed.

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "imgap/common.hpp"
#include "imgap/diffusion.hpp"
#include "imgap/graph.hpp"

namespace imgap {

/// A seed together with the full cascade observed from it.
struct Observation {
  NodeId seed = 0;
  NodeMask observed = 0;

  friend auto operator<=>(const Observation&, const Observation&) = default;
};

/// phi_L: the reach set of every node under one live-edge graph.
struct Realization {
  std::vector<NodeMask> spread;

  NodeMask operator()(NodeId v) const { return spread.at(v); }
};

/// Feedback observed so far. Entries are kept sorted by seed id, which makes
/// equal observations compare and hash equal regardless of selection order.
class PartialRealization {
 public:
  PartialRealization() = default;

  explicit PartialRealization(std::vector<Observation> entries) {
    for (const Observation& o : entries) add(o.seed, o.observed);
  }

  /// Throws ContractViolation if the seed is already present.
  void add(NodeId seed, NodeMask observed) {
    if (seed >= kMaxMaskNodes) throw InvalidArgument("seed " + std::to_string(seed) + " does not fit a 64-node mask");
    if (!contains(observed, seed)) {
      throw InvalidArgument("observed cascade of seed " + std::to_string(seed) + " must contain the seed");
    }
    auto it = std::lower_bound(entries_.begin(), entries_.end(), seed,
                               [](const Observation& o, NodeId s) { return o.seed < s; });
    if (it != entries_.end() && it->seed == seed) {
      throw ContractViolation("seed " + std::to_string(seed) + " selected twice");
    }
    entries_.insert(it, Observation{seed, observed});
    domain_ |= bit(seed);
    reached_ |= observed;
  }

  PartialRealization with(NodeId seed, NodeMask observed) const {
    PartialRealization out = *this;
    out.add(seed, observed);
    return out;
  }

  const std::vector<Observation>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// dom(psi)
  NodeMask domain() const noexcept { return domain_; }
  /// R(psi): union of the observed cascades.
  NodeMask reached() const noexcept { return reached_; }
  /// f(psi) = |R(psi)|
  std::size_t value() const noexcept { return count(reached_); }

  std::optional<NodeMask> observed(NodeId seed) const {
    for (const Observation& o : entries_) {
      if (o.seed == seed) return o.observed;
    }
    return std::nullopt;
  }

  /// psi is a sub-realization of other: same observation on every seed of psi.
  bool is_subset_of(const PartialRealization& other) const {
    for (const Observation& o : entries_) {
      if (other.observed(o.seed) != o.observed) return false;
    }
    return true;
  }

  friend bool operator==(const PartialRealization& a, const PartialRealization& b) { return a.entries_ == b.entries_; }
  friend auto operator<=>(const PartialRealization& a, const PartialRealization& b) {
    return a.entries_ <=> b.entries_;
  }

 private:
  std::vector<Observation> entries_;
  NodeMask domain_ = 0;
  NodeMask reached_ = 0;
};

inline Realization realize(const LiveEdgeEnumeration& model, std::size_t idx) {
  Realization r;
  r.spread.resize(model.n());
  for (NodeId v = 0; v < model.n(); ++v) r.spread[v] = model.reach(idx, v);
  return r;
}

inline Realization realize(const InfluenceGraph& g, const LiveEdgeGraph& l) {
  if (g.n() > kMaxMaskNodes) throw CapExceeded("realizations support at most 64 nodes");
  Realization r;
  r.spread.resize(g.n());
  for (NodeId v = 0; v < g.n(); ++v) r.spread[v] = to_mask(reach(g, {v}, l));
  return r;
}

/// The restriction of phi_L to the seeds in `domain`.
inline PartialRealization restrict_to(const LiveEdgeEnumeration& model, std::size_t idx, NodeMask domain) {
  PartialRealization psi;
  for (NodeMask d = domain; d; d &= d - 1) {
    const auto v = static_cast<NodeId>(std::countr_zero(d));
    psi.add(v, model.reach(idx, v));
  }
  return psi;
}

inline bool is_consistent(const LiveEdgeEnumeration& model, const PartialRealization& psi, std::size_t idx) {
  for (const Observation& o : psi.entries()) {
    if (o.seed >= model.n() || model.reach(idx, o.seed) != o.observed) return false;
  }
  return true;
}

inline bool is_consistent(const InfluenceGraph& g, const PartialRealization& psi, const LiveEdgeGraph& l) {
  for (const Observation& o : psi.entries()) {
    if (o.seed >= g.n() || to_mask(reach(g, {o.seed}, l)) != o.observed) return false;
  }
  return true;
}

/// Live-edge graphs consistent with psi, weights renormalized to sum to one.
/// Indices refer to the enumeration the posterior was built from.
struct Posterior {
  std::vector<std::size_t> support;
  std::vector<double> weights;
  /// Prior probability of psi.
  double mass = 0.0;
};

inline Posterior posterior(const LiveEdgeEnumeration& model, const PartialRealization& psi) {
  Posterior post;
  for (std::size_t idx = 0; idx < model.size(); ++idx) {
    if (is_consistent(model, psi, idx)) {
      post.support.push_back(idx);
      post.mass += model.weight(idx);
    }
  }
  if (!(post.mass > 0.0)) throw InconsistentObservation("no positive-probability live-edge graph produces this feedback");
  post.weights.reserve(post.support.size());
  for (std::size_t idx : post.support) post.weights.push_back(model.weight(idx) / post.mass);
  return post;
}

/// Delta(i | psi): expected number of newly reached nodes when i is seeded
/// after observing psi.
inline double delta(const LiveEdgeEnumeration& model, NodeId i, const PartialRealization& psi) {
  model.graph().check_node(i);
  const Posterior post = posterior(model, psi);
  const NodeMask reached = psi.reached();
  if (contains(reached, i)) return 0.0;
  double d = 0.0;
  for (std::size_t j = 0; j < post.support.size(); ++j) {
    d += post.weights[j] * static_cast<double>(count(model.reach(post.support[j], i) & ~reached));
  }
  return d;
}

/// Delta(i | psi) for every node i, from one pass over the posterior.
inline std::vector<double> all_deltas(const LiveEdgeEnumeration& model, const PartialRealization& psi) {
  const Posterior post = posterior(model, psi);
  const NodeMask reached = psi.reached();
  std::vector<double> d(model.n(), 0.0);
  for (std::size_t j = 0; j < post.support.size(); ++j) {
    for (NodeId i = 0; i < model.n(); ++i) {
      if (contains(reached, i)) continue;
      d[i] += post.weights[j] * static_cast<double>(count(model.reach(post.support[j], i) & ~reached));
    }
  }
  return d;
}

/// Monte Carlo estimate of Delta(i | psi) for graphs too large to enumerate.
/// Given psi, every edge leaving R(psi) is dead and edges among the remaining
/// nodes are still independent, so the gain of i outside R(psi) is the spread
/// of i in the graph with R(psi) removed.
inline double delta_mc(const InfluenceGraph& g, NodeId i, const PartialRealization& psi, std::uint64_t samples,
                       std::uint64_t seed) {
  g.check_node(i);
  if (samples < 1) throw InvalidArgument("Monte Carlo needs at least one sample");
  if (g.n() > kMaxMaskNodes) throw CapExceeded("partial realizations support at most 64 nodes");
  const NodeMask reached = psi.reached();
  if (contains(reached, i)) return 0.0;
  Rng rng(seed);
  std::uint64_t total = 0;
  std::vector<char> seen(g.n());
  std::vector<NodeId> stack;
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[i] = 1;
    stack.assign(1, i);
    std::uint64_t hit = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (std::size_t e : g.out_edges(u)) {
        const NodeId v = g.edge(e).dst;
        if (seen[v] || contains(reached, v)) continue;
        // one coin per edge: each u is expanded at most once
        if (uniform01(rng) < g.edge(e).prob) {
          seen[v] = 1;
          ++hit;
          stack.push_back(v);
        }
      }
    }
    total += hit;
  }
  return static_cast<double>(total) / static_cast<double>(samples);
}

}  // namespace imgap
