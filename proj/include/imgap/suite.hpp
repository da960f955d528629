#pragma once

// The small-instance verification suite: a deterministic list of graphs and
// budgets derived from one master seed, evaluated instance-parallel.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "imgap/common.hpp"
#include "imgap/gaps.hpp"
#include "imgap/graph.hpp"
#include "imgap/parallel.hpp"

namespace imgap {

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::size_t random_instances = 200;
  std::size_t random_uniform_instances = 20;
  /// Keep only instances whose graph is in this class (see matches_class).
  std::optional<std::string> filter;
  GapOptions gap;
};

struct SuiteInstance {
  std::string id;
  std::string family;
  std::string params;
  InfluenceGraph graph;
  std::size_t k = 0;
};

struct InstanceResult {
  std::string id;
  std::string family;
  std::string params;
  std::size_t k = 0;
  GapReport gap;
  std::vector<LemmaResult> lemmas;
  std::optional<std::string> error;

  bool passed() const {
    if (error || !gap.passed()) return false;
    return std::all_of(lemmas.begin(), lemmas.end(), [](const LemmaResult& l) { return l.pass; });
  }
};

struct SuiteResult {
  std::vector<InstanceResult> instances;

  bool passed() const {
    return std::all_of(instances.begin(), instances.end(), [](const InstanceResult& r) { return r.passed(); });
  }

  /// "instance: check" for every failed check, in instance order.
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const InstanceResult& r : instances) {
      if (r.error) out.push_back(r.id + ": error: " + *r.error);
      for (const BoundCheck& c : r.gap.checks) {
        if (!c.pass) out.push_back(r.id + ": bound " + c.bound);
      }
      for (const LemmaResult& l : r.lemmas) {
        if (!l.pass) out.push_back(r.id + ": " + l.id);
      }
    }
    return out;
  }
};

inline bool matches_class(const GraphClassReport& cls, std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "all") return true;
  if (name == "in_arborescence") return cls.is_in_arborescence;
  if (name == "out_arborescence") return cls.is_out_arborescence;
  if (name == "zero_bounded") return cls.is_zero_bounded;
  if (name == "alpha_bounded") return cls.min_alpha.has_value();
  if (name == "one_directional_bipartite") return cls.is_one_directional_bipartite;
  if (name == "general") return class_label(cls) == "general";
  throw InvalidArgument("unknown class filter '" + name + "'");
}

namespace detail {

inline std::string describe(const GeneratorSpec& spec) {
  std::string s = family_name(spec.family) + "(" + std::to_string(spec.a);
  if (spec.family == Family::one_directional_bipartite || spec.family == Family::star_subdivision ||
      spec.family == Family::parallel_links || spec.family == Family::random_digraph) {
    s += "," + std::to_string(spec.b);
  }
  s += ")";
  if (spec.probs.is_constant()) {
    s += " p=" + format_number(spec.probs.lo);
  } else {
    s += " p~U[" + format_number(spec.probs.lo) + "," + format_number(spec.probs.hi) + "]";
  }
  return s;
}

}  // namespace detail

inline std::vector<SuiteInstance> build_suite(const SuiteConfig& cfg) {
  std::vector<SuiteInstance> out;
  std::uint64_t stream = 0;

  auto add = [&](const std::string& family, GeneratorSpec spec, std::size_t k) {
    const std::uint64_t graph_seed = derive_seed(cfg.seed, stream++);
    SuiteInstance inst;
    inst.family = family;
    inst.graph = generate(spec, graph_seed);
    inst.params = detail::describe(spec) + " k=" + std::to_string(k);
    inst.k = k;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", out.size());
    inst.id = family + "-" + buf;
    out.push_back(std::move(inst));
  };

  const double probs[] = {0.3, 0.5, 1.0};
  const std::size_t budgets[] = {2, 3};

  Rng pick(derive_seed(cfg.seed, 0xC0FFEE));
  auto pick_int = [&](std::size_t lo, std::size_t hi) { return static_cast<std::size_t>(uniform_int(pick, lo, hi)); };
  auto random_spec = [&](ProbabilityRule rule) {
    const std::size_t n = pick_int(3, 6);
    const std::size_t m = pick_int(1, std::min<std::size_t>(10, n * (n - 1)));
    return GeneratorSpec{Family::random_digraph, n, m, true, rule};
  };
  for (std::size_t i = 0; i < cfg.random_instances; ++i) {
    const double p = probs[pick_int(0, 2)];
    const GeneratorSpec spec = random_spec(ProbabilityRule::constant(p));
    add("random", spec, budgets[pick_int(0, 1)]);
  }
  for (std::size_t i = 0; i < cfg.random_uniform_instances; ++i) {
    const GeneratorSpec spec = random_spec(ProbabilityRule::uniform(0.1, 0.9));
    add("random_uniform", spec, budgets[pick_int(0, 1)]);
  }

  for (std::size_t n = 3; n <= 7; ++n) {
    for (double p : probs) {
      for (std::size_t k : budgets) add("in_arborescence", {Family::in_arborescence, n, 0, true, ProbabilityRule::constant(p)}, k);
    }
  }
  for (std::size_t n = 3; n <= 6; ++n) {
    for (std::size_t k : budgets) add("out_arborescence", {Family::out_arborescence, n, 0, true, ProbabilityRule::constant(0.5)}, k);
  }
  for (std::size_t n = 3; n <= 6; ++n) {
    for (double p : {0.3, 0.5, 0.7}) {
      for (std::size_t k : budgets) add("directed_path", {Family::path, n, 0, true, ProbabilityRule::constant(p)}, k);
    }
  }
  for (Family f : {Family::path, Family::cycle}) {
    for (std::size_t n = 3; n <= 7; ++n) {
      for (double p : probs) {
        for (std::size_t k : budgets) add(family_name(f), {f, n, 0, false, ProbabilityRule::constant(p)}, k);
      }
    }
  }
  for (auto [h, len] : {std::pair<std::size_t, std::size_t>{3, 1}, {3, 2}, {4, 1}, {5, 1}}) {
    for (std::size_t k : budgets) add("star", {Family::star_subdivision, h, len, false, ProbabilityRule::constant(0.5)}, k);
  }
  for (auto [h, len] : {std::pair<std::size_t, std::size_t>{3, 1}, {4, 1}, {2, 2}}) {
    for (std::size_t k : budgets) add("parallel", {Family::parallel_links, h, len, false, ProbabilityRule::constant(0.5)}, k);
  }
  for (auto [a, b] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}, {3, 3}}) {
    for (std::size_t k : budgets) {
      add("bipartite", {Family::one_directional_bipartite, a, b, true, ProbabilityRule::constant(0.5)}, k);
    }
  }

  if (cfg.filter) {
    std::erase_if(out, [&](const SuiteInstance& s) { return !matches_class(classify(s.graph), *cfg.filter); });
  }
  return out;
}

inline InstanceResult run_instance(const SuiteInstance& s, const GapOptions& opts) {
  InstanceResult r;
  r.id = s.id;
  r.family = s.family;
  r.params = s.params;
  r.k = s.k;
  try {
    const ExactInstance inst(s.graph, s.k, opts);
    r.gap = measure_gap(inst, s.id, opts);
    r.lemmas = verify_lemma_suite(inst, opts);
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

inline SuiteResult run_suite(const std::vector<SuiteInstance>& instances, const GapOptions& opts, std::size_t workers) {
  SuiteResult res;
  res.instances = parallel_map(instances.size(), workers, [&](std::size_t i) { return run_instance(instances[i], opts); });
  return res;
}

inline SuiteResult run_suite(const SuiteConfig& cfg, std::size_t workers) {
  return run_suite(build_suite(cfg), cfg.gap, workers);
}

/// Canonical JSON report. Contains nothing that depends on the worker count
/// or wall-clock time.
inline nlohmann::json to_json(const SuiteResult& res, const SuiteConfig& cfg) {
  nlohmann::json instances = nlohmann::json::array();
  std::uint64_t checks = 0;
  for (const InstanceResult& r : res.instances) {
    nlohmann::json lemmas = nlohmann::json::array();
    for (const LemmaResult& l : r.lemmas) {
      lemmas.push_back(to_json(l));
      checks += l.checks;
    }
    checks += r.gap.checks.size();
    nlohmann::json j = {{"id", r.id},     {"family", r.family}, {"params", r.params},
                        {"k", r.k},       {"gap", to_json(r.gap)}, {"lemmas", lemmas},
                        {"pass", r.passed()}};
    if (r.error) j["error"] = *r.error;
    instances.push_back(std::move(j));
  }
  const auto failures = res.failures();
  nlohmann::json config = {{"seed", cfg.seed},
                           {"random_instances", cfg.random_instances},
                           {"random_uniform_instances", cfg.random_uniform_instances},
                           {"filter", cfg.filter ? nlohmann::json(*cfg.filter) : nlohmann::json(nullptr)},
                           {"max_edges", cfg.gap.max_edges},
                           {"max_combinations", cfg.gap.max_combinations},
                           {"force_wrong_bound", cfg.gap.force_wrong_bound}};
  return {{"config", config},
          {"instances", instances},
          {"summary", {{"instances", res.instances.size()}, {"checks", checks}, {"failures", failures.size()},
                       {"pass", res.passed()}}},
          {"failures", failures}};
}

inline std::string to_csv(const SuiteResult& res) {
  std::string out = csv_header();
  for (const InstanceResult& r : res.instances) {
    if (r.error) out += r.id + ",," + std::to_string(r.k) + ",error,,,false\n";
    out += to_csv_rows(r.gap);
    out += to_csv_rows(r.gap, r.lemmas);
  }
  return out;
}

}  // namespace imgap
