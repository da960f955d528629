#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "imgap/graph.hpp"

using namespace imgap;

namespace {

InfluenceGraph undirected_path(std::size_t n, double p = 0.5) {
  return generate({Family::path, n, 0, false, ProbabilityRule::constant(p)}, 1);
}

}  // namespace

TEST(Format, DirectedPath) {
  const InfluenceGraph g = parse_graph("directed\n3\n0 1 0.5\n1 2 0.5\n");
  EXPECT_EQ(g.n(), 3u);
  ASSERT_EQ(g.m(), 2u);
  EXPECT_TRUE(g.is_directed());
  EXPECT_EQ(g.edge(0), (Edge{0, 1, 0.5}));
  EXPECT_EQ(g.edge(1), (Edge{1, 2, 0.5}));
}

TEST(Format, UndirectedExpandsBothDirections) {
  const InfluenceGraph g = parse_graph("undirected\n2\n0 1 0.3 0.7\n");
  ASSERT_EQ(g.m(), 2u);
  EXPECT_EQ(g.edge(*g.find_edge(0, 1)).prob, 0.3);
  EXPECT_EQ(g.edge(*g.find_edge(1, 0)).prob, 0.7);
}

TEST(Format, UndirectedSecondProbabilityDefaultsToFirst) {
  const InfluenceGraph g = parse_graph("undirected\n2\n0 1 0.4\n");
  EXPECT_EQ(g.edge(*g.find_edge(1, 0)).prob, 0.4);
}

TEST(Format, CommentsAndBlankLines) {
  const InfluenceGraph g = parse_graph("# header\n\ndirected  # kind\n2\n\n0 1 1 # edge\n");
  EXPECT_EQ(g.m(), 1u);
}

TEST(Format, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_graph(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("directed\n3\n0 1 0.5\n0 0 0.5\n"), 4u);   // self-loop
  EXPECT_EQ(line_of("directed\n3\n0 1 0.5\n0 1 0.2\n"), 4u);   // duplicate
  EXPECT_EQ(line_of("directed\n3\n0 1 1.5\n"), 3u);            // probability
  EXPECT_EQ(line_of("directed\n3\n0 3 0.5\n"), 3u);            // node range
  EXPECT_EQ(line_of("sideways\n3\n"), 1u);
  EXPECT_EQ(line_of("undirected\n3\n0 1 0.5\n1 0 0.5\n"), 4u); // same pair twice
  EXPECT_EQ(line_of("directed\nthree\n"), 2u);
  EXPECT_EQ(line_of("directed\n3\n0 1\n"), 3u);
}

TEST(Format, SelfLoopMessage) {
  try {
    parse_graph("directed\n3\n0 0 0.5\n");
    FAIL() << "self-loop accepted";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos);
  }
}

TEST(Format, RoundTripPreservesEdgesBitExactly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const InfluenceGraph g =
        generate({Family::random_digraph, 6, 12, true, ProbabilityRule::uniform(0.0, 1.0)}, seed);
    const InfluenceGraph h = parse_graph(format_graph(g));
    EXPECT_EQ(g.edges(), h.edges());
    const InfluenceGraph u = generate({Family::cycle, 5, 0, false, ProbabilityRule::uniform(0.1, 0.9)}, seed);
    const InfluenceGraph v = parse_graph(format_graph(u));
    EXPECT_EQ(u.edges(), v.edges());
    EXPECT_FALSE(v.is_directed());
  }
}

TEST(Format, SaveAndLoad) {
  const auto path = std::filesystem::temp_directory_path() / "imgap_test_graph.txt";
  const InfluenceGraph g = undirected_path(4, 0.25);
  save_graph(g, path.string());
  EXPECT_EQ(load_graph(path.string()).edges(), g.edges());
  std::filesystem::remove(path);
  EXPECT_THROW(load_graph(path.string()), Error);
}

TEST(Format, ShippedFixturesLoad) {
  for (const char* name : {"two_node.txt", "directed_path_witness.txt", "star_3x1.txt", "clique_4.txt",
                           "cycle_5.txt", "parallel_3x1.txt", "in_arborescence_6.txt"}) {
    EXPECT_NO_THROW(load_graph(std::string(IMGAP_FIXTURES) + "/" + name)) << name;
  }
  EXPECT_THROW(load_graph(std::string(IMGAP_FIXTURES) + "/bad_self_loop.txt"), ParseError);
}

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(InfluenceGraph(2, {{0, 2, 0.5}}), InvalidArgument);
  EXPECT_THROW(InfluenceGraph(2, {{1, 1, 0.5}}), InvalidArgument);
  EXPECT_THROW(InfluenceGraph(2, {{0, 1, -0.1}}), InvalidArgument);
  EXPECT_THROW(InfluenceGraph(2, {{0, 1, 0.5}, {0, 1, 0.5}}), InvalidArgument);
  EXPECT_THROW(InfluenceGraph(2, {{0, 1, 0.5}}, /*directed=*/false), InvalidArgument);
}

TEST(Graph, AdjacencyIndices) {
  const InfluenceGraph g(4, {{0, 1, 0.5}, {2, 1, 0.5}, {1, 3, 0.5}, {0, 3, 0.5}});
  ASSERT_EQ(g.out_edges(0).size(), 2u);
  EXPECT_EQ(g.in_edges(1).size(), 2u);
  EXPECT_EQ(g.in_edges(3).size(), 2u);
  EXPECT_TRUE(g.out_edges(3).empty());
  EXPECT_EQ(g.neighbors(1), (NodeSet{0, 2, 3}));
  EXPECT_FALSE(g.find_edge(1, 0));
}

TEST(Classify, InArborescence) {
  const InfluenceGraph g(3, {{1, 0, 0.5}, {2, 0, 0.5}});
  const GraphClassReport r = classify(g);
  EXPECT_TRUE(r.is_in_arborescence);
  EXPECT_FALSE(r.is_out_arborescence);
  EXPECT_FALSE(r.min_alpha);
  EXPECT_EQ(class_label(r), "in_arborescence");
}

TEST(Classify, NotArborescence) {
  // two roots
  EXPECT_FALSE(classify(InfluenceGraph(3, {{1, 0, 0.5}})).is_in_arborescence);
  // a node with two parents
  EXPECT_FALSE(classify(InfluenceGraph(3, {{0, 1, 0.5}, {0, 2, 0.5}})).is_in_arborescence);
  // directed cycle plus isolated root
  EXPECT_FALSE(classify(InfluenceGraph(3, {{0, 1, 0.5}, {1, 0, 0.5}})).is_in_arborescence);
}

TEST(Classify, UndirectedPathIsZeroBounded) {
  const GraphClassReport r = classify(undirected_path(5));
  ASSERT_TRUE(r.min_alpha);
  EXPECT_EQ(*r.min_alpha, 0u);
  EXPECT_TRUE(r.is_zero_bounded);
  EXPECT_EQ(class_label(r), "zero_bounded");
}

TEST(Classify, StarIsThreeBounded) {
  const InfluenceGraph star = parse_graph("undirected\n4\n0 1 0.5\n0 2 0.5\n0 3 0.5\n");
  const GraphClassReport r = classify(star);
  ASSERT_TRUE(r.min_alpha);
  EXPECT_EQ(*r.min_alpha, 3u);
  EXPECT_FALSE(r.is_zero_bounded);
  EXPECT_EQ(class_label(r), "alpha_bounded");
}

TEST(Classify, CliqueOnFourNodes) {
  const GraphClassReport r = classify(load_graph(std::string(IMGAP_FIXTURES) + "/clique_4.txt"));
  ASSERT_TRUE(r.min_alpha);
  EXPECT_EQ(*r.min_alpha, 12u);
}

TEST(Classify, OneDirectionalBipartite) {
  const InfluenceGraph g = generate({Family::one_directional_bipartite, 2, 3, true, ProbabilityRule::constant(0.5)}, 1);
  EXPECT_EQ(g.n(), 5u);
  EXPECT_EQ(g.m(), 6u);
  EXPECT_TRUE(classify(g).is_one_directional_bipartite);
  EXPECT_FALSE(classify(InfluenceGraph(3, {{0, 1, 0.5}, {1, 2, 0.5}})).is_one_directional_bipartite);
}

TEST(Boundary, Examples) {
  const InfluenceGraph c4 = generate({Family::cycle, 4, 0, false, ProbabilityRule::constant(0.5)}, 1);
  EXPECT_EQ(boundary(c4, {0, 1}), (NodeSet{0, 1}));
  EXPECT_EQ(boundary(c4, {0, 1, 2, 3}), NodeSet{});
  EXPECT_EQ(boundary(c4, {}), NodeSet{});
  EXPECT_THROW(boundary(c4, {4}), InvalidArgument);
}

TEST(Boundary, SetAndMaskFormsAgree) {
  const InfluenceGraph g = generate({Family::random_digraph, 6, 14, true, ProbabilityRule::constant(0.5)}, 3);
  for (NodeMask u = 0; u < 64; ++u) {
    const NodeSet b = boundary(g, to_set(u));
    EXPECT_EQ(to_mask(b), boundary_mask(g, u));
    // every boundary node lies in U and has an out-neighbor outside U
    for (NodeId v : b) {
      EXPECT_TRUE(contains(u, v));
      bool leaves = false;
      for (std::size_t e : g.out_edges(v)) leaves = leaves || !contains(u, g.edge(e).dst);
      EXPECT_TRUE(leaves);
    }
  }
}

// Adding an edge never removes a boundary node for a fixed U.
TEST(Boundary, MonotoneInEdgeSet) {
  const InfluenceGraph g = generate({Family::random_digraph, 6, 12, true, ProbabilityRule::constant(0.5)}, 11);
  for (std::size_t drop = 0; drop < g.m(); ++drop) {
    std::vector<Edge> fewer = g.edges();
    fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(drop));
    const InfluenceGraph h(g.n(), fewer);
    for (NodeMask u = 0; u < 64; ++u) {
      const NodeMask small = boundary_mask(h, u);
      EXPECT_EQ(small & ~boundary_mask(g, u), 0u) << "drop " << drop << " U " << u;
    }
  }
}

TEST(Components, InducedSubgraphs) {
  const InfluenceGraph p = undirected_path(6);
  EXPECT_EQ(component_count(p, 0), 0u);
  EXPECT_EQ(component_count(p, 0b111111), 1u);
  EXPECT_EQ(component_count(p, 0b101101), 3u);
  EXPECT_EQ(component_count(p, 0b010101), 3u);
}

TEST(Generate, FamiliesClassifyAsTheirClass) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t n = 1; n <= 7; ++n) {
      const auto in = generate({Family::in_arborescence, n, 0, true, ProbabilityRule::constant(0.5)}, seed);
      EXPECT_TRUE(classify(in).is_in_arborescence);
      const auto out = generate({Family::out_arborescence, n, 0, true, ProbabilityRule::constant(0.5)}, seed);
      EXPECT_TRUE(classify(out).is_out_arborescence);
    }
  }
  EXPECT_TRUE(classify(generate({Family::in_arborescence, 4, 0, true, ProbabilityRule::constant(0.5)}, 9))
                  .is_in_arborescence);
  EXPECT_EQ(classify(undirected_path(6)).min_alpha, 0u);
  EXPECT_EQ(classify(generate({Family::cycle, 5, 0, false, ProbabilityRule::constant(0.5)}, 1)).min_alpha, 0u);
  const auto star = generate({Family::star_subdivision, 3, 2, false, ProbabilityRule::constant(0.5)}, 1);
  EXPECT_EQ(star.n(), 7u);
  EXPECT_EQ(classify(star).min_alpha, 3u);
  const auto par = generate({Family::parallel_links, 3, 1, false, ProbabilityRule::constant(0.5)}, 1);
  EXPECT_EQ(par.n(), 5u);
  EXPECT_EQ(classify(par).min_alpha, 6u);  // two endpoints of degree 3
}

TEST(Generate, DirectedPathIsBothArborescences) {
  const auto g = generate({Family::path, 5, 0, true, ProbabilityRule::constant(0.5)}, 1);
  EXPECT_EQ(g.m(), 4u);
  const auto r = classify(g);
  EXPECT_TRUE(r.is_in_arborescence);
  EXPECT_TRUE(r.is_out_arborescence);
}

TEST(Generate, InfeasibleSpecs) {
  EXPECT_THROW(generate({Family::cycle, 2, 0, false, ProbabilityRule::constant(0.5)}, 1), InvalidArgument);
  EXPECT_THROW(generate({Family::random_digraph, 3, 7, true, ProbabilityRule::constant(0.5)}, 1), InvalidArgument);
  EXPECT_THROW(generate({Family::path, 3, 0, false, ProbabilityRule::uniform(0.5, 1.5)}, 1), InvalidArgument);
  EXPECT_THROW(generate({Family::star_subdivision, 0, 1, false, ProbabilityRule::constant(0.5)}, 1), InvalidArgument);
}

TEST(Generate, RandomDigraphHasRequestedSize) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate({Family::random_digraph, 5, 9, true, ProbabilityRule::constant(0.3)}, seed);
    EXPECT_EQ(g.n(), 5u);
    EXPECT_EQ(g.m(), 9u);
  }
  EXPECT_EQ(generate({Family::random_digraph, 4, 12, true, ProbabilityRule::constant(0.3)}, 1).m(), 12u);
}

TEST(Generate, SameSeedSameGraph) {
  const GeneratorSpec spec{Family::random_digraph, 6, 10, true, ProbabilityRule::uniform(0.1, 0.9)};
  EXPECT_EQ(generate(spec, 42).edges(), generate(spec, 42).edges());
  EXPECT_NE(generate(spec, 42).edges(), generate(spec, 43).edges());
}

TEST(Generate, UniformProbabilitiesStayInRange) {
  const auto g = generate({Family::cycle, 7, 0, false, ProbabilityRule::uniform(0.2, 0.4)}, 5);
  for (const Edge& e : g.edges()) {
    EXPECT_GE(e.prob, 0.2);
    EXPECT_LE(e.prob, 0.4);
  }
}

TEST(Generate, FamilyNames) {
  EXPECT_EQ(parse_family("in-arb"), Family::in_arborescence);
  EXPECT_EQ(parse_family("star"), Family::star_subdivision);
  EXPECT_EQ(parse_family("one-directional-bipartite"), Family::one_directional_bipartite);
  EXPECT_FALSE(parse_family("tree"));
  for (Family f : {Family::in_arborescence, Family::out_arborescence, Family::path, Family::cycle,
                   Family::one_directional_bipartite, Family::star_subdivision, Family::parallel_links,
                   Family::random_digraph}) {
    EXPECT_EQ(parse_family(family_name(f)), f);
  }
}

TEST(Rng, UniformIntStaysInRangeAndCoversIt) {
  Rng rng(1);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = uniform_int(rng, 3, 7);
    ASSERT_GE(v, 3u);
    ASSERT_LE(v, 7u);
    ++hits[v - 3];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, DerivedSeedsDependOnlyOnThePair) {
  EXPECT_EQ(derive_seed(1, 5), derive_seed(1, 5));
  EXPECT_NE(derive_seed(1, 5), derive_seed(1, 6));
  EXPECT_NE(derive_seed(1, 5), derive_seed(2, 5));
}
