#pragma once

// Adaptivity-gap measurement and exhaustive checks of the inequalities that
// bound it, on instances small enough for exact oracles.

#include <algorithm>
#include <bit>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "imgap/bounds.hpp"
#include "imgap/common.hpp"
#include "imgap/diffusion.hpp"
#include "imgap/graph.hpp"
#include "imgap/policies.hpp"
#include "imgap/realization.hpp"

namespace imgap {

struct GapOptions {
  std::size_t max_edges = kDefaultMaxEdges;
  std::uint64_t max_combinations = kDefaultMaxCombinations;
  /// Harness self-test: report a deliberately wrong budget bound (0.5).
  bool force_wrong_bound = false;
  /// Exhaustive adaptive-submodularity checks only run up to these sizes.
  std::size_t submodularity_max_nodes = 5;
  std::size_t submodularity_max_edges = 8;
  /// Subset enumerations (spread of every U, boundary of every U) cap.
  std::size_t subset_max_nodes = 16;
};

struct BoundCheck {
  std::string bound;
  double value = 0.0;
  double slack = 0.0;  // bound - ratio
  bool pass = false;
};

struct GapReport {
  std::string instance;
  std::string graph_class;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double opt_a = 0.0;
  double opt_n = 0.0;
  double ratio = 0.0;
  NodeSet opt_n_seeds;
  std::vector<BoundCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
  }
};

/// Outcome of one family of inequality checks on one instance.
struct LemmaResult {
  std::string id;
  std::uint64_t checks = 0;
  /// min over checks of (rhs - lhs) / n; +inf when nothing was checked.
  double worst_slack = std::numeric_limits<double>::infinity();
  bool pass = true;

  void record(double rhs, double lhs, std::size_t n) {
    const double s = (rhs - lhs) / static_cast<double>(std::max<std::size_t>(n, 1));
    ++checks;
    worst_slack = std::min(worst_slack, s);
    if (s < -kSlack) pass = false;
  }
};

/// Everything the exact oracles produce for one (graph, k).
struct ExactInstance {
  LiveEdgeEnumeration model;
  GraphClassReport cls;
  std::size_t k;
  NonAdaptiveOptimum opt_n;
  PolicyTree opt_a;
  MarginalVector x;

  ExactInstance(const InfluenceGraph& g, std::size_t k_, const GapOptions& opts)
      : model(g, opts.max_edges),
        cls(classify(g)),
        k(positive(k_)),
        opt_n(opt_nonadaptive(model, k_, opts.max_combinations)),
        opt_a(opt_adaptive(model, k_)),
        x(marginals(opt_a)) {}

 private:
  static std::size_t positive(std::size_t k) {
    if (k < 1) throw InvalidArgument("budget k must be at least 1");
    return k;
  }
};

inline GapReport measure_gap(const ExactInstance& inst, const std::string& id, const GapOptions& opts = {}) {
  const InfluenceGraph& g = inst.model.graph();
  GapReport r;
  r.instance = id;
  r.graph_class = class_label(inst.cls);
  r.n = g.n();
  r.m = g.m();
  r.k = inst.k;
  r.opt_a = inst.opt_a.value();
  r.opt_n = inst.opt_n.value();
  r.ratio = r.opt_a / r.opt_n;
  r.opt_n_seeds = to_set(inst.opt_n.best_set());

  auto add = [&](std::string name, double value) {
    BoundCheck c{std::move(name), value, value - r.ratio, false};
    c.pass = c.slack >= -kSlack;
    r.checks.push_back(std::move(c));
  };
  add("budget", opts.force_wrong_bound ? 0.5 : bound_budget(inst.k));
  add("cube_root", static_cast<double>(bound_cube_root(g.n())));
  if (inst.k >= 2) {
    if (inst.cls.is_in_arborescence) add("in_arborescence", bound_in_arborescence(inst.k));
    if (inst.cls.min_alpha) add("alpha_bounded", bound_alpha(*inst.cls.min_alpha, inst.k));
    if (inst.cls.is_zero_bounded) add("zero_bounded", bound_zero_bounded(inst.k));
  }
  return r;
}

inline GapReport measure_gap(const InfluenceGraph& g, std::size_t k, const GapOptions& opts = {},
                             const std::string& id = "graph") {
  return measure_gap(ExactInstance(g, k, opts), id, opts);
}

// ---- inequality checks -----------------------------------------------------

namespace detail {

class SpreadCache {
 public:
  explicit SpreadCache(const LiveEdgeEnumeration& model) : model_(model) {}
  double operator()(NodeMask s) {
    auto [it, fresh] = cache_.try_emplace(s, 0.0);
    if (fresh) it->second = model_.spread(s);
    return it->second;
  }

 private:
  const LiveEdgeEnumeration& model_;
  std::unordered_map<NodeMask, double> cache_;
};

inline std::vector<NodeMask> observation_key(const LiveEdgeEnumeration& model, std::size_t idx, NodeMask domain) {
  std::vector<NodeMask> key;
  for (NodeMask d = domain; d; d &= d - 1) key.push_back(model.reach(idx, static_cast<NodeId>(std::countr_zero(d))));
  return key;
}

}  // namespace detail

/// For every t in 1..k and every feedback psi = psi_{t-1,L} of positive
/// probability (domain S_{t-1}):
///   sigma(R(psi)) + sum_i x_i * E[|R(S_{t-1} + i)| - f(psi) | psi] >= OPT_A(G,k).
inline LemmaResult check_hybrid_increment(const ExactInstance& inst, detail::SpreadCache& sigma) {
  const auto& model = inst.model;
  const std::size_t n = model.n();
  LemmaResult res{"hybrid_increment"};
  for (std::size_t t = 1; t <= inst.k; ++t) {
    const NodeMask base = inst.opt_n.sets[t - 1];
    struct Acc {
      double mass = 0.0;
      NodeMask reached = 0;
      std::vector<double> reach_sum;
    };
    std::map<std::vector<NodeMask>, Acc> groups;
    for (std::size_t idx = 0; idx < model.size(); ++idx) {
      const double w = model.weight(idx);
      if (w == 0.0) continue;
      Acc& acc = groups[detail::observation_key(model, idx, base)];
      if (acc.reach_sum.empty()) acc.reach_sum.assign(n, 0.0);
      acc.mass += w;
      acc.reached = model.reach(idx, base);
      for (NodeId i = 0; i < n; ++i) {
        acc.reach_sum[i] += w * static_cast<double>(count(acc.reached | model.reach(idx, i)));
      }
    }
    for (const auto& [key, acc] : groups) {
      const double f = static_cast<double>(count(acc.reached));
      double increment = 0.0;
      for (NodeId i = 0; i < n; ++i) increment += inst.x.x[i] * (acc.reach_sum[i] / acc.mass - f);
      res.record(sigma(acc.reached) + increment, inst.opt_a.value(), n);
    }
  }
  return res;
}

/// Reach-set inequalities sigma(R(psi_{t-1,L})) <= f(psi_{t-1,L}) + extra(t)
/// over every t in 1..k and every live-edge graph L.
template <class Extra>
LemmaResult check_reach_bound(const ExactInstance& inst, detail::SpreadCache& sigma, std::string id, Extra&& extra) {
  const auto& model = inst.model;
  LemmaResult res{std::move(id)};
  for (std::size_t t = 1; t <= inst.k; ++t) {
    const NodeMask base = inst.opt_n.sets[t - 1];
    const double rhs_extra = extra(t);
    std::set<NodeMask> seen;
    for (std::size_t idx = 0; idx < model.size(); ++idx) {
      const NodeMask r = model.reach(idx, base);
      if (!seen.insert(r).second) continue;
      res.record(static_cast<double>(count(r)) + rhs_extra, sigma(r), model.n());
    }
  }
  return res;
}

/// In-arborescences: |boundary(R(psi_{t-1,L}))| <= t - 1.
inline LemmaResult check_in_arborescence_boundary(const ExactInstance& inst) {
  const auto& model = inst.model;
  LemmaResult res{"in_arborescence_boundary"};
  for (std::size_t t = 1; t <= inst.k; ++t) {
    std::set<NodeMask> seen;
    for (std::size_t idx = 0; idx < model.size(); ++idx) {
      const NodeMask r = model.reach(idx, inst.opt_n.sets[t - 1]);
      if (!seen.insert(r).second) continue;
      res.record(static_cast<double>(t - 1), static_cast<double>(count(boundary_mask(model.graph(), r))), model.n());
    }
  }
  return res;
}

/// sigma(U) <= (|U| / k) * OPT_N(G,k) for every U with |U| >= k.
inline LemmaResult check_subset_spread(const ExactInstance& inst, detail::SpreadCache& sigma) {
  const std::size_t n = inst.model.n();
  LemmaResult res{"subset_spread"};
  const double per_seed = inst.opt_n.value() / static_cast<double>(inst.k);
  for (NodeMask u = 1; u <= full_mask(n); ++u) {
    const std::size_t h = count(u);
    if (h < inst.k) continue;
    res.record(static_cast<double>(h) * per_seed, sigma(u), n);
    if (u == full_mask(n)) break;
  }
  return res;
}

/// Symmetric graphs: every U with at most k components (undirected view)
/// has |boundary(U)| <= alpha + 2k.
inline LemmaResult check_boundary_size(const ExactInstance& inst) {
  const InfluenceGraph& g = inst.model.graph();
  const std::size_t n = g.n();
  LemmaResult res{"boundary_size"};
  const double limit = static_cast<double>(*inst.cls.min_alpha + 2 * inst.k);
  for (NodeMask u = 1; u <= full_mask(n); ++u) {
    if (component_count(g, u) <= inst.k) res.record(limit, static_cast<double>(count(boundary_mask(g, u))), n);
    if (u == full_mask(n)) break;
  }
  return res;
}

/// Recursion OPT_N(t) >= base/k + (1 - c/k) * OPT_N(t-1) for t in 1..k.
inline LemmaResult check_recursion(const ExactInstance& inst, std::string id, double base, double c) {
  LemmaResult res{std::move(id)};
  const double kd = static_cast<double>(inst.k);
  for (std::size_t t = 1; t <= inst.k; ++t) {
    const double rhs = base / kd + (1.0 - c / kd) * inst.opt_n.values[t - 1];
    res.record(inst.opt_n.values[t], rhs, inst.model.n());
  }
  return res;
}

/// The hybrid policy never beats the best t-set: hybrid_value(t) <= OPT_N(t).
inline LemmaResult check_hybrid_below_opt_n(const ExactInstance& inst) {
  LemmaResult res{"hybrid_below_opt_n"};
  for (std::size_t t = 1; t <= inst.k; ++t) {
    res.record(inst.opt_n.values[t], hybrid_value(inst.model, inst.opt_n, inst.k, t, inst.x), inst.model.n());
  }
  return res;
}

/// Greedy marginal gains over V are non-increasing.
inline LemmaResult check_greedy_increments(const ExactInstance& inst) {
  LemmaResult res{"greedy_increments_nonincreasing"};
  const GreedySequence seq = greedy_nonadaptive(inst.model);
  for (std::size_t t = 1; t < seq.increments.size(); ++t) {
    res.record(seq.increments[t - 1], seq.increments[t], inst.model.n());
  }
  return res;
}

/// Adaptive greedy reaches (1 - 1/e) of the adaptive optimum.
inline LemmaResult check_greedy_adaptive(const ExactInstance& inst) {
  LemmaResult res{"greedy_adaptive_guarantee"};
  const GreedyAdaptivePolicy greedy(inst.model, inst.k);
  const double value = policy_value_exact(inst.model, greedy, inst.k);
  res.record(value, (1.0 - 1.0 / std::numbers::e) * inst.opt_a.value(), inst.model.n());
  return res;
}

/// Delta(i | psi') <= Delta(i | psi) for every consistent psi within psi' and
/// every i outside R(psi'), over all partial realizations of the graph.
/// Gains are accumulated per feedback state in one pass per seed domain, an
/// independent route from realization.hpp's posterior-based delta().
inline LemmaResult check_adaptive_submodularity(const LiveEdgeEnumeration& model) {
  const std::size_t n = model.n();
  LemmaResult res{"adaptive_submodularity"};
  if (n > 20) throw CapExceeded("adaptive submodularity check enumerates 2^n domains; n=" + std::to_string(n));
  const std::size_t domains = std::size_t{1} << n;

  struct State {
    NodeMask reached = 0;
    double mass = 0.0;
    std::vector<double> gain;  // sum_L w * |R({i},L) \ R(psi)|, normalized later
  };
  std::vector<std::vector<State>> states(domains);
  std::vector<std::vector<std::uint32_t>> state_of(domains, std::vector<std::uint32_t>(model.size(), 0));

  for (NodeMask d = 0; d < domains; ++d) {
    std::map<std::vector<NodeMask>, std::uint32_t> ids;
    for (std::size_t idx = 0; idx < model.size(); ++idx) {
      const double w = model.weight(idx);
      if (w == 0.0) continue;
      auto [it, fresh] = ids.try_emplace(detail::observation_key(model, idx, d), static_cast<std::uint32_t>(states[d].size()));
      if (fresh) states[d].push_back(State{model.reach(idx, d), 0.0, std::vector<double>(n, 0.0)});
      State& s = states[d][it->second];
      s.mass += w;
      for (NodeId i = 0; i < n; ++i) s.gain[i] += w * static_cast<double>(count(model.reach(idx, i) & ~s.reached));
      state_of[d][idx] = it->second;
    }
    for (State& s : states[d]) {
      for (double& gi : s.gain) gi /= s.mass;
    }
  }

  std::set<std::tuple<NodeMask, std::uint32_t, NodeMask>> done;
  for (std::size_t idx = 0; idx < model.size(); ++idx) {
    if (model.weight(idx) == 0.0) continue;
    for (NodeMask big = 0; big < domains; ++big) {
      const std::uint32_t big_id = state_of[big][idx];
      const State& outer = states[big][big_id];
      // every sub-domain of `big`, including the empty one
      for (NodeMask small = big;; small = (small - 1) & big) {
        if (done.emplace(big, big_id, small).second) {
          const State& inner = states[small][state_of[small][idx]];
          for (NodeId i = 0; i < n; ++i) {
            if (contains(outer.reached, i)) continue;
            res.record(inner.gain[i], outer.gain[i], n);
          }
        }
        if (small == 0) break;
      }
    }
  }
  return res;
}

/// Every applicable inequality family for one instance, gated by graph class.
inline std::vector<LemmaResult> verify_lemma_suite(const ExactInstance& inst, const GapOptions& opts = {}) {
  const std::size_t n = inst.model.n();
  const double kd = static_cast<double>(inst.k);
  detail::SpreadCache sigma(inst.model);
  std::vector<LemmaResult> out;

  out.push_back(check_hybrid_increment(inst, sigma));
  out.push_back(check_hybrid_below_opt_n(inst));
  if (n <= opts.subset_max_nodes) out.push_back(check_subset_spread(inst, sigma));
  out.push_back(check_greedy_increments(inst));
  out.push_back(check_greedy_adaptive(inst));
  if (n <= opts.submodularity_max_nodes && inst.model.graph().m() <= opts.submodularity_max_edges) {
    out.push_back(check_adaptive_submodularity(inst.model));
  }

  if (inst.cls.is_in_arborescence) {
    out.push_back(check_reach_bound(inst, sigma, "in_arborescence_reach",
                                    [&](std::size_t t) { return inst.opt_n.values[t - 1]; }));
    out.push_back(check_in_arborescence_boundary(inst));
    if (inst.k >= 2) out.push_back(check_recursion(inst, "opt_n_recursion_in_arborescence", inst.opt_a.value(), 2.0));
  }
  if (inst.cls.min_alpha) {
    const double alpha = static_cast<double>(*inst.cls.min_alpha);
    const double factor = alpha / kd + 2.0;
    out.push_back(check_reach_bound(inst, sigma, "alpha_bounded_reach",
                                    [&](std::size_t) { return factor * inst.opt_n.value(); }));
    if (n <= opts.subset_max_nodes) out.push_back(check_boundary_size(inst));
    out.push_back(check_recursion(inst, "opt_n_recursion_alpha_bounded",
                                  inst.opt_a.value() - factor * inst.opt_n.value(), 1.0));
  }
  if (inst.cls.is_zero_bounded) {
    out.push_back(check_reach_bound(inst, sigma, "zero_bounded_reach",
                                    [&](std::size_t t) { return 2.0 * inst.opt_n.values[t - 1]; }));
    out.push_back(check_recursion(inst, "opt_n_recursion_zero_bounded", inst.opt_a.value(), 3.0));
  }
  return out;
}

inline std::vector<LemmaResult> verify_lemma_suite(const InfluenceGraph& g, std::size_t k, const GapOptions& opts = {}) {
  return verify_lemma_suite(ExactInstance(g, k, opts), opts);
}

// ---- serialization ---------------------------------------------------------

inline nlohmann::json to_json(const GapReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const BoundCheck& c : r.checks) {
    checks.push_back({{"bound", c.bound}, {"value", c.value}, {"slack", c.slack}, {"pass", c.pass}});
  }
  return {{"instance", r.instance}, {"class", r.graph_class}, {"n", r.n},      {"m", r.m},
          {"k", r.k},               {"opt_a", r.opt_a},       {"opt_n", r.opt_n}, {"ratio", r.ratio},
          {"opt_n_seeds", r.opt_n_seeds}, {"checks", checks}, {"pass", r.passed()}};
}

inline nlohmann::json to_json(const LemmaResult& l) {
  nlohmann::json slack = std::isfinite(l.worst_slack) ? nlohmann::json(l.worst_slack) : nlohmann::json(nullptr);
  return {{"id", l.id}, {"checks", l.checks}, {"worst_slack", slack}, {"pass", l.pass}};
}

inline std::string csv_header() { return "instance,class,k,check,value,slack,pass\n"; }

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

/// One row per bound check; `value` is the bound's value.
inline std::string to_csv_rows(const GapReport& r) {
  std::string out;
  for (const BoundCheck& c : r.checks) {
    out += r.instance + ',' + r.graph_class + ',' + std::to_string(r.k) + ',' + c.bound + ',' +
           format_number(c.value) + ',' + format_number(c.slack) + ',' + (c.pass ? "true" : "false") + '\n';
  }
  return out;
}

/// One row per inequality family; `value` is the number of checks performed.
inline std::string to_csv_rows(const GapReport& r, const std::vector<LemmaResult>& lemmas) {
  std::string out;
  for (const LemmaResult& l : lemmas) {
    out += r.instance + ',' + r.graph_class + ',' + std::to_string(r.k) + ',' + l.id + ',' + std::to_string(l.checks) +
           ',' + format_number(l.worst_slack) + ',' + (l.pass ? "true" : "false") + '\n';
  }
  return out;
}

}  // namespace imgap
