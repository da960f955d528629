#pragma once

// Seed-selection policies: the adaptive executor, exact optimal adaptive and
// non-adaptive oracles, greedy policies, selection marginals and the hybrid
// non-adaptive policy built from them.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imgap/common.hpp"
#include "imgap/diffusion.hpp"
#include "imgap/graph.hpp"
#include "imgap/realization.hpp"

namespace imgap {

/// Maps the feedback observed so far to the next seed, or nullopt for STOP.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::optional<NodeId> next(const PartialRealization& psi) const = 0;
  virtual std::size_t budget() const = 0;
};

/// Seeds a fixed list in order, ignoring feedback. The non-adaptive policy.
class FixedOrderPolicy final : public Policy {
 public:
  explicit FixedOrderPolicy(std::vector<NodeId> seeds) : seeds_(std::move(seeds)) {}

  std::optional<NodeId> next(const PartialRealization& psi) const override {
    if (psi.size() >= seeds_.size()) return std::nullopt;
    return seeds_[psi.size()];
  }
  std::size_t budget() const override { return seeds_.size(); }

 private:
  std::vector<NodeId> seeds_;
};

namespace detail {

template <class ReachOf>
PartialRealization execute(const Policy& pi, std::size_t n, ReachOf&& reach_of) {
  PartialRealization psi;
  // A policy that never stops must eventually repeat a seed.
  for (std::size_t step = 0; step <= n; ++step) {
    const std::optional<NodeId> v = pi.next(psi);
    if (!v) return psi;
    if (*v >= n) throw ContractViolation("policy selected node " + std::to_string(*v) + " outside the graph");
    if (contains(psi.domain(), *v)) throw ContractViolation("policy selected seed " + std::to_string(*v) + " twice");
    psi.add(*v, reach_of(*v));
  }
  throw ContractViolation("policy did not stop after selecting every node");
}

}  // namespace detail

/// Runs pi against live-edge graph L: query, seed, observe the full cascade,
/// repeat until STOP. Returns psi_{pi,L}.
inline PartialRealization run_policy(const InfluenceGraph& g, const Policy& pi, const LiveEdgeGraph& l) {
  if (g.n() > kMaxMaskNodes) throw CapExceeded("adaptive policies support at most 64 nodes");
  return detail::execute(pi, g.n(), [&](NodeId v) { return to_mask(reach(g, {v}, l)); });
}

inline PartialRealization run_policy(const LiveEdgeEnumeration& model, const Policy& pi, std::size_t idx) {
  return detail::execute(pi, model.n(), [&](NodeId v) { return model.reach(idx, v); });
}

/// sigma(pi) = E_L[f(psi_{pi,L})]. Every run must select exactly k seeds.
/// Zero-probability live-edge graphs are skipped.
inline double policy_value_exact(const LiveEdgeEnumeration& model, const Policy& pi, std::size_t k) {
  double value = 0.0;
  for (std::size_t idx = 0; idx < model.size(); ++idx) {
    if (model.weight(idx) == 0.0) continue;
    const PartialRealization psi = run_policy(model, pi, idx);
    if (psi.size() != k) {
      throw ContractViolation("policy selected " + std::to_string(psi.size()) + " seeds, expected " + std::to_string(k));
    }
    value += model.weight(idx) * static_cast<double>(psi.value());
  }
  return value;
}

// ---- non-adaptive ----------------------------------------------------------

/// Optimal seed sets S_t and values OPT_N(G,t) for every t = 0..k.
struct NonAdaptiveOptimum {
  std::vector<NodeMask> sets;
  std::vector<double> values;

  std::size_t k() const { return sets.size() - 1; }
  NodeMask best_set() const { return sets.back(); }
  double value() const { return values.back(); }
};

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::uint64_t{1} << 62)) return r;
  }
  return r;
}

/// Exhaustive search over all t-subsets, in lexicographic order; the first
/// (lexicographically smallest) set among ties is kept.
inline NonAdaptiveOptimum opt_nonadaptive(const LiveEdgeEnumeration& model, std::size_t k,
                                          std::uint64_t max_combinations = kDefaultMaxCombinations) {
  const std::size_t n = model.n();
  if (k > n) throw InvalidArgument("budget k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  if (binomial(n, k) > max_combinations) {
    throw CapExceeded("C(" + std::to_string(n) + "," + std::to_string(k) + ") seed sets exceed the search cap of " +
                      std::to_string(max_combinations));
  }
  NonAdaptiveOptimum opt;
  opt.sets.push_back(0);
  opt.values.push_back(0.0);
  for (std::size_t t = 1; t <= k; ++t) {
    std::vector<NodeId> comb(t);
    for (std::size_t i = 0; i < t; ++i) comb[i] = static_cast<NodeId>(i);
    NodeMask best = 0;
    double best_value = -1.0;
    while (true) {
      NodeMask s = 0;
      for (NodeId v : comb) s |= bit(v);
      const double v = model.spread(s);
      if (best_value < 0.0 || v > best_value + kRelTol * std::max(1.0, best_value)) {
        best = s;
        best_value = v;
      }
      // next combination in lexicographic order
      std::size_t i = t;
      while (i > 0 && comb[i - 1] == n - t + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < t; ++j) comb[j] = comb[j - 1] + 1;
    }
    opt.sets.push_back(best);
    opt.values.push_back(best_value);
  }
  return opt;
}

/// Greedy order over a candidate set U: U_t = U_{t-1} + argmax marginal gain,
/// smallest id on ties. increments[t-1] = sigma(U_t) - sigma(U_{t-1}).
struct GreedySequence {
  std::vector<NodeId> order;
  std::vector<double> increments;
  std::vector<double> values;  // sigma(U_t), t = 1..steps
};

inline GreedySequence greedy_nonadaptive(const LiveEdgeEnumeration& model, NodeMask candidates,
                                         std::optional<std::size_t> steps = std::nullopt) {
  if (candidates & ~full_mask(model.n())) throw InvalidArgument("candidate set contains nodes outside the graph");
  const std::size_t h = steps.value_or(count(candidates));
  if (h > count(candidates)) throw InvalidArgument("more greedy steps than candidates");
  GreedySequence seq;
  NodeMask current = 0;
  double current_value = 0.0;
  for (std::size_t t = 0; t < h; ++t) {
    NodeId best = 0;
    double best_value = -1.0;
    for (NodeMask c = candidates & ~current; c; c &= c - 1) {
      const auto i = static_cast<NodeId>(std::countr_zero(c));
      const double v = model.spread(current | bit(i));
      if (best_value < 0.0 || v > best_value + kRelTol * std::max(1.0, best_value)) {
        best = i;
        best_value = v;
      }
    }
    current |= bit(best);
    seq.order.push_back(best);
    seq.increments.push_back(best_value - current_value);
    seq.values.push_back(best_value);
    current_value = best_value;
  }
  return seq;
}

inline GreedySequence greedy_nonadaptive(const LiveEdgeEnumeration& model) {
  return greedy_nonadaptive(model, full_mask(model.n()));
}

// ---- optimal adaptive policy -----------------------------------------------

struct PolicyNode;

struct PolicyBranch {
  NodeMask observed = 0;
  double prob = 0.0;  // conditional on reaching the parent
  std::shared_ptr<const PolicyNode> child;
};

/// Decision node (seed set) or leaf (no seed, value = f(psi)).
struct PolicyNode {
  std::optional<NodeId> seed;
  double value = 0.0;
  std::vector<PolicyBranch> branches;  // sorted by observed mask
};

/// Optimal adaptive policy as a decision tree over observed cascades.
/// Identical feedback states share one subtree.
struct PolicyTree {
  std::size_t n = 0;
  std::size_t k = 0;
  std::shared_ptr<const PolicyNode> root;

  double value() const { return root->value; }
};

namespace detail {

class AdaptiveSolver {
 public:
  AdaptiveSolver(const LiveEdgeEnumeration& model, std::size_t k) : model_(model), k_(k) {}

  std::shared_ptr<const PolicyNode> solve(const PartialRealization& psi, const std::vector<std::size_t>& support,
                                          double mass) {
    if (psi.size() == k_) {
      auto leaf = std::make_shared<PolicyNode>();
      leaf->value = static_cast<double>(psi.value());
      return leaf;
    }
    if (auto it = memo_.find(psi); it != memo_.end()) return it->second;

    std::optional<PolicyNode> best;
    std::vector<std::pair<NodeMask, std::size_t>> keyed;
    keyed.reserve(support.size());
    for (NodeId i = 0; i < model_.n(); ++i) {
      if (contains(psi.domain(), i)) continue;
      keyed.clear();
      for (std::size_t idx : support) keyed.emplace_back(model_.reach(idx, i), idx);
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });

      PolicyNode node;
      node.seed = i;
      std::vector<std::size_t> group;
      for (std::size_t a = 0; a < keyed.size();) {
        std::size_t b = a;
        double group_mass = 0.0;
        group.clear();
        while (b < keyed.size() && keyed[b].first == keyed[a].first) {
          group.push_back(keyed[b].second);
          group_mass += model_.weight(keyed[b].second);
          ++b;
        }
        PolicyBranch branch;
        branch.observed = keyed[a].first;
        branch.prob = group_mass / mass;
        branch.child = solve(psi.with(i, branch.observed), group, group_mass);
        node.value += branch.prob * branch.child->value;
        node.branches.push_back(std::move(branch));
        a = b;
      }
      if (!best || node.value > best->value + kRelTol * std::max(1.0, best->value)) best = std::move(node);
    }
    auto out = std::make_shared<const PolicyNode>(std::move(*best));
    memo_.emplace(psi, out);
    return out;
  }

 private:
  const LiveEdgeEnumeration& model_;
  std::size_t k_;
  std::map<PartialRealization, std::shared_ptr<const PolicyNode>> memo_;
};

}  // namespace detail

/// Exact optimal adaptive policy by expectimax over feedback states:
/// V(psi, 0) = f(psi), V(psi, r) = max_i E[V(psi + (i, R({i},L)), r-1) | psi].
/// Ties go to the smallest node id. Zero-probability outcomes get no branch.
inline PolicyTree opt_adaptive(const LiveEdgeEnumeration& model, std::size_t k) {
  if (k > model.n()) throw InvalidArgument("budget k=" + std::to_string(k) + " exceeds n=" + std::to_string(model.n()));
  std::vector<std::size_t> support;
  double mass = 0.0;
  for (std::size_t idx = 0; idx < model.size(); ++idx) {
    if (model.weight(idx) > 0.0) {
      support.push_back(idx);
      mass += model.weight(idx);
    }
  }
  detail::AdaptiveSolver solver(model, k);
  return PolicyTree{model.n(), k, solver.solve(PartialRealization{}, support, mass)};
}

/// Follows a PolicyTree: at each decision node, descend along the branch of
/// the cascade observed for that node's seed.
class TreePolicy final : public Policy {
 public:
  explicit TreePolicy(PolicyTree tree) : tree_(std::move(tree)) {}

  std::optional<NodeId> next(const PartialRealization& psi) const override {
    const PolicyNode* node = tree_.root.get();
    while (node->seed) {
      const std::optional<NodeMask> seen = psi.observed(*node->seed);
      if (!seen) return node->seed;
      const PolicyNode* child = nullptr;
      for (const PolicyBranch& b : node->branches) {
        if (b.observed == *seen) child = b.child.get();
      }
      if (!child) throw ContractViolation("observed cascade is outside the policy tree's support");
      node = child;
    }
    return std::nullopt;
  }
  std::size_t budget() const override { return tree_.k; }

 private:
  PolicyTree tree_;
};

/// x_i = probability that node i is selected by the policy.
struct MarginalVector {
  std::vector<double> x;

  double sum() const {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
};

/// Marginals by traversal: each decision node adds the probability of the
/// path reaching it to its seed.
inline MarginalVector marginals(const PolicyTree& tree) {
  if (!tree.root) throw InvalidArgument("empty policy tree");
  MarginalVector m;
  m.x.assign(tree.n, 0.0);
  auto walk = [&](auto&& self, const PolicyNode& node, double path_prob, std::size_t depth) -> void {
    if (!node.seed) return;
    if (*node.seed >= tree.n || depth >= tree.k) throw InvalidArgument("malformed policy tree");
    m.x[*node.seed] += path_prob;
    for (const PolicyBranch& b : node.branches) {
      if (!b.child) throw InvalidArgument("malformed policy tree: branch without child");
      self(self, *b.child, path_prob * b.prob, depth + 1);
    }
  };
  walk(walk, *tree.root, 1.0, 0);
  return m;
}

/// Marginals by running the policy on every live-edge graph.
inline MarginalVector marginals_by_execution(const LiveEdgeEnumeration& model, const Policy& pi) {
  MarginalVector m;
  m.x.assign(model.n(), 0.0);
  for (std::size_t idx = 0; idx < model.size(); ++idx) {
    if (model.weight(idx) == 0.0) continue;
    const PartialRealization psi = run_policy(model, pi, idx);
    for (const Observation& o : psi.entries()) m.x[o.seed] += model.weight(idx);
  }
  return m;
}

inline void check_marginals(const MarginalVector& x, std::size_t n, std::size_t k) {
  if (x.x.size() != n) throw InvalidArgument("marginal vector has the wrong length");
  if (std::abs(x.sum() - static_cast<double>(k)) > kSlack) {
    throw InvalidArgument("marginals sum to " + std::to_string(x.sum()) + ", expected k=" + std::to_string(k));
  }
}

/// E_{L,rho}[f(psi_{rho,t,L})]: seed S_{t-1}, then one extra node drawn with
/// probability x_i / k.
inline double hybrid_value(const LiveEdgeEnumeration& model, const NonAdaptiveOptimum& opt, std::size_t k,
                           std::size_t t, const MarginalVector& x) {
  if (t < 1 || t > k) throw InvalidArgument("hybrid step t must lie in 1..k");
  if (opt.sets.size() < t) throw InvalidArgument("non-adaptive optimum does not cover t-1");
  check_marginals(x, model.n(), k);
  const NodeMask base = opt.sets[t - 1];
  double v = 0.0;
  for (NodeId i = 0; i < model.n(); ++i) {
    if (x.x[i] == 0.0) continue;
    v += x.x[i] / static_cast<double>(k) * model.spread(base | bit(i));
  }
  return v;
}

// ---- greedy adaptive -------------------------------------------------------

struct GreedyMode {
  enum class Kind { exact, monte_carlo } kind = Kind::exact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  static GreedyMode exact() { return {}; }
  static GreedyMode mc(std::uint64_t samples, std::uint64_t seed) { return {Kind::monte_carlo, samples, seed}; }
};

/// Seeds argmax_i Delta(i | psi) among unselected nodes, smallest id on ties,
/// until k seeds are chosen. Decisions are cached per feedback state.
class GreedyAdaptivePolicy final : public Policy {
 public:
  /// Exact mode; `model` must outlive the policy.
  GreedyAdaptivePolicy(const LiveEdgeEnumeration& model, std::size_t k)
      : model_(&model), graph_(&model.graph()), k_(k) {
    if (k > model.n()) throw InvalidArgument("budget exceeds n");
  }

  /// Monte Carlo mode; `g` must outlive the policy.
  GreedyAdaptivePolicy(const InfluenceGraph& g, std::size_t k, GreedyMode mode)
      : graph_(&g), k_(k), mode_(mode) {
    if (k > g.n()) throw InvalidArgument("budget exceeds n");
    if (mode.kind == GreedyMode::Kind::exact) throw InvalidArgument("exact greedy needs a live-edge enumeration");
    if (mode.samples < 1) throw InvalidArgument("Monte Carlo greedy needs at least one sample");
  }

  std::optional<NodeId> next(const PartialRealization& psi) const override {
    if (psi.size() >= k_) return std::nullopt;
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(psi); it != cache_.end()) return it->second;
    }
    std::vector<double> gains(graph_->n(), 0.0);
    if (model_) {
      gains = all_deltas(*model_, psi);
    } else {
      const std::uint64_t step_seed = derive_seed(mode_.seed, psi.size());
      for (NodeId i = 0; i < graph_->n(); ++i) {
        if (!contains(psi.domain(), i)) gains[i] = delta_mc(*graph_, i, psi, mode_.samples, derive_seed(step_seed, i));
      }
    }
    std::optional<NodeId> best;
    for (NodeId i = 0; i < graph_->n(); ++i) {
      if (contains(psi.domain(), i)) continue;
      if (!best || gains[i] > gains[*best] + kRelTol * std::max(1.0, gains[*best])) best = i;
    }
    std::lock_guard lock(mu_);
    cache_.emplace(psi, best);
    return best;
  }
  std::size_t budget() const override { return k_; }

 private:
  const LiveEdgeEnumeration* model_ = nullptr;
  const InfluenceGraph* graph_ = nullptr;
  std::size_t k_ = 0;
  GreedyMode mode_;
  mutable std::mutex mu_;
  mutable std::map<PartialRealization, std::optional<NodeId>> cache_;
};

inline std::unique_ptr<GreedyAdaptivePolicy> greedy_adaptive(const LiveEdgeEnumeration& model, std::size_t k) {
  return std::make_unique<GreedyAdaptivePolicy>(model, k);
}

inline std::unique_ptr<GreedyAdaptivePolicy> greedy_adaptive(const InfluenceGraph& g, std::size_t k, GreedyMode mode) {
  return std::make_unique<GreedyAdaptivePolicy>(g, k, mode);
}

// ---- serialization ---------------------------------------------------------

inline nlohmann::json to_json(const PolicyNode& node) {
  nlohmann::json j;
  j["seed"] = node.seed ? nlohmann::json(*node.seed) : nlohmann::json(nullptr);
  j["value"] = node.value;
  j["branches"] = nlohmann::json::array();
  for (const PolicyBranch& b : node.branches) {
    j["branches"].push_back({{"observed", to_set(b.observed)}, {"prob", b.prob}, {"child", to_json(*b.child)}});
  }
  return j;
}

inline nlohmann::json to_json(const PolicyTree& tree) {
  return {{"n", tree.n}, {"k", tree.k}, {"value", tree.value()}, {"root", to_json(*tree.root)}};
}

}  // namespace imgap
