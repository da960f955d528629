// imgap: command-line front end for the influence-maximization adaptivity-gap
// toolkit. Subcommands: gen | spread | opt | gap | verify | sweep.
//
// Exit status: 0 on success (for verify: every check passed), 1 when verify
// finds a failing check, 2 on usage or input errors.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "imgap/imgap.hpp"

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t max_edges = imgap::kDefaultMaxEdges;
  std::uint64_t max_combinations = imgap::kDefaultMaxCombinations;
  std::string out;
  std::string format;  // empty: command default
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw imgap::Error("cannot write '" + g.out + "'");
  f << text;
}

std::string format_or(const Globals& g, const char* fallback) { return g.format.empty() ? fallback : g.format; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

imgap::NodeSet parse_seeds(const std::vector<std::string>& tokens, const imgap::InfluenceGraph& graph) {
  imgap::NodeSet s;
  for (const std::string& tok : tokens) {
    std::stringstream ss(tok);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(part, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != part.size()) throw imgap::InvalidArgument("bad seed '" + part + "'");
      graph.check_node(static_cast<imgap::NodeId>(v));
      s.push_back(static_cast<imgap::NodeId>(v));
    }
  }
  return imgap::normalized(std::move(s));
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string family;
  std::size_t a = 0;
  std::optional<std::size_t> b;
  std::optional<double> p;
  std::vector<double> p_range;
  bool directed = false;
  bool undirected = false;
};

void run_gen(const Globals& g, const GenArgs& args) {
  const auto fam = imgap::parse_family(args.family);
  if (!fam) throw imgap::InvalidArgument("unknown family '" + args.family + "'");
  imgap::GeneratorSpec spec;
  spec.family = *fam;
  spec.a = args.a;
  const bool two_sizes = *fam == imgap::Family::one_directional_bipartite ||
                         *fam == imgap::Family::star_subdivision || *fam == imgap::Family::parallel_links ||
                         *fam == imgap::Family::random_digraph;
  if (two_sizes && !args.b) throw imgap::InvalidArgument(imgap::family_name(*fam) + " needs a second size");
  if (!two_sizes && args.b) throw imgap::InvalidArgument(imgap::family_name(*fam) + " takes a single size");
  spec.b = args.b.value_or(0);
  if (args.directed && args.undirected) throw imgap::InvalidArgument("--directed and --undirected conflict");
  if ((args.directed || args.undirected) && *fam != imgap::Family::path && *fam != imgap::Family::cycle) {
    throw imgap::InvalidArgument("only path and cycle take an orientation flag");
  }
  spec.directed = args.directed;
  if (args.p && !args.p_range.empty()) throw imgap::InvalidArgument("--p and --p-range conflict");
  if (!args.p_range.empty()) {
    spec.probs = imgap::ProbabilityRule::uniform(args.p_range[0], args.p_range[1]);
  } else {
    spec.probs = imgap::ProbabilityRule::constant(args.p.value_or(0.5));
  }
  emit(g, imgap::format_graph(imgap::generate(spec, g.seed)));
}

// ---- spread ----------------------------------------------------------------

struct SpreadArgs {
  std::string graph;
  std::vector<std::string> seeds;
  bool exact = false;
  std::optional<std::uint64_t> mc;
};

void run_spread(const Globals& g, const SpreadArgs& args) {
  const imgap::InfluenceGraph graph = imgap::load_graph(args.graph);
  const imgap::NodeSet seeds = parse_seeds(args.seeds, graph);
  json j = {{"seeds", seeds}};
  if (args.mc) {
    const imgap::SpreadEstimate est = imgap::spread_mc(graph, seeds, *args.mc, g.seed, g.workers);
    j["method"] = "mc";
    j["spread"] = est.mean;
    j["std_error"] = est.std_error;
    j["samples"] = est.samples;
    j["seed"] = g.seed;
  } else {
    j["method"] = "exact";
    j["spread"] = imgap::spread_exact(graph, seeds, g.max_edges);
  }
  if (format_or(g, "json") == "csv") {
    std::string seeds_col;
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds_col += (i ? " " : "") + std::to_string(seeds[i]);
    std::string out = "seeds,method,spread,std_error,samples\n" + seeds_col + "," + j["method"].get<std::string>() +
                      "," + imgap::format_number(j["spread"].get<double>()) + ",";
    if (args.mc) out += imgap::format_number(j["std_error"].get<double>()) + "," + std::to_string(*args.mc);
    else out += ",";
    emit(g, out + "\n");
  } else {
    emit(g, dump(j));
  }
}

// ---- opt -------------------------------------------------------------------

void run_opt(const Globals& g, const std::string& path, std::size_t k, bool tree) {
  const imgap::InfluenceGraph graph = imgap::load_graph(path);
  const imgap::LiveEdgeEnumeration model(graph, g.max_edges);
  const imgap::NonAdaptiveOptimum opt_n = imgap::opt_nonadaptive(model, k, g.max_combinations);
  const imgap::PolicyTree opt_a = imgap::opt_adaptive(model, k);
  const imgap::MarginalVector x = imgap::marginals(opt_a);
  const auto greedy = imgap::greedy_adaptive(model, k);
  const double greedy_value = imgap::policy_value_exact(model, *greedy, k);

  if (format_or(g, "json") == "csv") {
    std::string out = "k,opt_n,opt_a,greedy_adaptive,ratio\n";
    out += std::to_string(k) + "," + imgap::format_number(opt_n.value()) + "," + imgap::format_number(opt_a.value()) +
           "," + imgap::format_number(greedy_value) + "," + imgap::format_number(opt_a.value() / opt_n.value()) + "\n";
    emit(g, out);
    return;
  }
  json j;
  j["k"] = k;
  j["non_adaptive"] = {{"value", opt_n.value()},
                       {"seeds", imgap::to_set(opt_n.best_set())},
                       {"values_by_budget", opt_n.values}};
  j["adaptive"] = {{"value", opt_a.value()}, {"marginals", x.x}};
  if (tree) j["adaptive"]["policy"] = imgap::to_json(opt_a);
  j["greedy_adaptive"] = greedy_value;
  j["ratio"] = opt_a.value() / opt_n.value();
  emit(g, dump(j));
}

// ---- gap -------------------------------------------------------------------

void run_gap(const Globals& g, const std::string& path, std::size_t k, bool lemmas) {
  const imgap::InfluenceGraph graph = imgap::load_graph(path);
  imgap::GapOptions opts;
  opts.max_edges = g.max_edges;
  opts.max_combinations = g.max_combinations;
  const imgap::ExactInstance inst(graph, k, opts);
  const imgap::GapReport report = imgap::measure_gap(inst, path, opts);
  std::vector<imgap::LemmaResult> results;
  if (lemmas) results = imgap::verify_lemma_suite(inst, opts);

  if (format_or(g, "json") == "csv") {
    emit(g, imgap::csv_header() + imgap::to_csv_rows(report) + imgap::to_csv_rows(report, results));
    return;
  }
  json j = imgap::to_json(report);
  if (lemmas) {
    j["lemmas"] = json::array();
    for (const auto& l : results) j["lemmas"].push_back(imgap::to_json(l));
  }
  emit(g, dump(j));
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::optional<std::string> filter;
  bool self_test = false;
  std::size_t random_instances = 200;
  std::size_t random_uniform_instances = 20;
};

int run_verify(const Globals& g, const VerifyArgs& args) {
  imgap::SuiteConfig cfg;
  cfg.seed = g.seed;
  cfg.random_instances = args.random_instances;
  cfg.random_uniform_instances = args.random_uniform_instances;
  cfg.filter = args.filter;
  cfg.gap.max_edges = g.max_edges;
  cfg.gap.max_combinations = g.max_combinations;
  cfg.gap.force_wrong_bound = args.self_test;

  const imgap::SuiteResult res = imgap::run_suite(cfg, g.workers);
  if (format_or(g, "json") == "csv") {
    emit(g, imgap::to_csv(res));
  } else {
    emit(g, dump(imgap::to_json(res, cfg)));
  }
  const auto failures = res.failures();
  for (const std::string& f : failures) std::cerr << "FAIL " << f << "\n";
  std::cerr << res.instances.size() << " instances, " << failures.size() << " failures\n";
  return failures.empty() ? 0 : 1;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string bound;
  std::size_t k_min = 2;
  std::size_t k_max = 100;
  std::uint64_t alpha_min = 0;
  std::uint64_t alpha_max = 20;
};

void run_sweep(const Globals& g, const SweepArgs& args) {
  if (args.k_min < 2 || args.k_min > args.k_max) throw imgap::InvalidArgument("need 2 <= k-min <= k-max");
  if (args.alpha_min > args.alpha_max) throw imgap::InvalidArgument("need alpha-min <= alpha-max");
  std::string name = args.bound;
  std::replace(name.begin(), name.end(), '-', '_');

  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  if (name == "in_arborescence" || name == "in_arb") {
    columns = {"k", "bound", "limit", "prior_bound"};
    for (std::size_t k = args.k_min; k <= args.k_max; ++k) {
      rows.push_back({static_cast<double>(k), imgap::bound_in_arborescence(k), imgap::in_arborescence_limit(),
                      imgap::prior_in_arborescence_bound()});
    }
  } else if (name == "zero_bounded") {
    columns = {"k", "bound", "limit"};
    for (std::size_t k = args.k_min; k <= args.k_max; ++k) {
      rows.push_back({static_cast<double>(k), imgap::bound_zero_bounded(k), imgap::zero_bounded_limit()});
    }
  } else if (name == "alpha" || name == "alpha_bounded") {
    columns = {"alpha", "k", "bound", "closed_form"};
    for (std::uint64_t a = args.alpha_min; a <= args.alpha_max; ++a) {
      for (std::size_t k = args.k_min; k <= args.k_max; ++k) {
        rows.push_back({static_cast<double>(a), static_cast<double>(k), imgap::bound_alpha(a, k),
                        imgap::bound_alpha_closed_form(a)});
      }
    }
  } else {
    throw imgap::InvalidArgument("unknown bound '" + args.bound + "' (in_arborescence | zero_bounded | alpha)");
  }

  if (format_or(g, "csv") == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json o;
      for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
      arr.push_back(o);
    }
    emit(g, dump({{"bound", name}, {"rows", arr}}));
    return;
  }
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + imgap::format_number(r[c]);
    out += "\n";
  }
  emit(g, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptivity gaps for influence maximization under the independent cascade model"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads for instance-parallel work")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-edges", g.max_edges, "largest m enumerated exactly (2^m live-edge graphs)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-combinations", g.max_combinations, "largest C(n,k) searched for the non-adaptive optimum")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--format", g.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a graph file");
  gen_cmd->add_option("family", gen.family,
                      "in_arborescence | out_arborescence | path | cycle | bipartite | star | parallel | random")
      ->required();
  gen_cmd->add_option("a", gen.a, "n; arms h for star/parallel; left side for bipartite")->required();
  gen_cmd->add_option("b", gen.b, "arm length; link length; right side for bipartite; m for random");
  gen_cmd->add_option("--p", gen.p, "constant edge probability (default 0.5)");
  gen_cmd->add_option("--p-range", gen.p_range, "i.i.d. uniform edge probabilities on [lo, hi]")->expected(2);
  gen_cmd->add_flag("--directed", gen.directed, "path/cycle: orient edges i -> i+1");
  gen_cmd->add_flag("--undirected", gen.undirected, "path/cycle: both directions (default)");

  SpreadArgs spread;
  auto* spread_cmd = app.add_subcommand("spread", "expected spread of a seed set");
  spread_cmd->add_option("graph", spread.graph)->required();
  spread_cmd->add_option("seeds", spread.seeds, "seed ids, space or comma separated");
  auto* exact_flag = spread_cmd->add_flag("--exact", spread.exact, "enumerate all live-edge graphs (default)");
  spread_cmd->add_option("--mc", spread.mc, "Monte Carlo with this many samples")
      ->check(CLI::PositiveNumber)
      ->excludes(exact_flag);

  std::string opt_graph;
  std::size_t opt_k = 0;
  bool opt_tree = false;
  auto* opt_cmd = app.add_subcommand("opt", "optimal non-adaptive and adaptive values");
  opt_cmd->add_option("graph", opt_graph)->required();
  opt_cmd->add_option("k", opt_k)->required()->check(CLI::PositiveNumber);
  opt_cmd->add_flag("--tree", opt_tree, "include the optimal adaptive policy tree");

  std::string gap_graph;
  std::size_t gap_k = 0;
  bool gap_lemmas = false;
  auto* gap_cmd = app.add_subcommand("gap", "adaptivity gap and applicable bounds for one graph");
  gap_cmd->add_option("graph", gap_graph)->required();
  gap_cmd->add_option("k", gap_k)->required()->check(CLI::PositiveNumber);
  gap_cmd->add_flag("--lemmas", gap_lemmas, "also run the inequality checks");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run the bound and inequality suite");
  verify_cmd->add_option("--filter", verify.filter,
                         "keep one graph class: in_arborescence | out_arborescence | zero_bounded | alpha_bounded | "
                         "one_directional_bipartite | general | all");
  verify_cmd->add_flag("--self-test", verify.self_test, "report a deliberately wrong bound; the run must fail");
  verify_cmd->add_option("--random", verify.random_instances, "random constant-probability digraphs")
      ->capture_default_str();
  verify_cmd->add_option("--random-uniform", verify.random_uniform_instances,
                         "random digraphs with uniform edge probabilities")
      ->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "tabulate a bound over a parameter range");
  sweep_cmd->add_option("bound", sweep.bound, "in_arborescence | zero_bounded | alpha")->required();
  sweep_cmd->add_option("--k-min", sweep.k_min)->capture_default_str();
  sweep_cmd->add_option("--k-max", sweep.k_max)->capture_default_str();
  sweep_cmd->add_option("--alpha-min", sweep.alpha_min)->capture_default_str();
  sweep_cmd->add_option("--alpha-max", sweep.alpha_max)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) run_gen(g, gen);
    if (*spread_cmd) run_spread(g, spread);
    if (*opt_cmd) run_opt(g, opt_graph, opt_k, opt_tree);
    if (*gap_cmd) run_gap(g, gap_graph, gap_k, gap_lemmas);
    if (*verify_cmd) return run_verify(g, verify);
    if (*sweep_cmd) run_sweep(g, sweep);
  } catch (const imgap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
