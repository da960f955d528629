#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "imgap/diffusion.hpp"
#include "oracles.hpp"

using namespace imgap;

namespace {

InfluenceGraph random_graph(std::uint64_t seed, std::size_t n, std::size_t m) {
  return generate({Family::random_digraph, n, m, true, ProbabilityRule::uniform(0.05, 0.95)}, seed);
}

// a -> b -> c
InfluenceGraph abc(double p) { return InfluenceGraph(3, {{0, 1, p}, {1, 2, p}}); }

}  // namespace

TEST(LiveEdge, DeterministicWeights) {
  Rng rng(3);
  const InfluenceGraph ones = abc(1.0);
  const LiveEdgeGraph all = sample_live(ones, rng);
  EXPECT_EQ(all.live, (std::vector<bool>{true, true}));
  EXPECT_EQ(all.weight, 1.0);
  const LiveEdgeGraph none = sample_live(abc(0.0), rng);
  EXPECT_EQ(none.live, (std::vector<bool>{false, false}));
  EXPECT_EQ(none.weight, 1.0);
}

TEST(LiveEdge, SampledFrequencyMatchesProbability) {
  const InfluenceGraph g(2, {{0, 1, 0.5}});
  Rng rng(11);
  const int draws = 10000;
  int live = 0;
  for (int i = 0; i < draws; ++i) live += sample_live(g, rng).live[0] ? 1 : 0;
  const double freq = static_cast<double>(live) / draws;
  const double se = std::sqrt(0.25 / draws);
  EXPECT_NEAR(freq, 0.5, 3 * se);
}

TEST(LiveEdge, EnumerationWeights) {
  const auto two = enumerate_live(abc(0.5));
  ASSERT_EQ(two.size(), 4u);
  for (const auto& l : two) EXPECT_DOUBLE_EQ(l.weight, 0.25);

  const auto one = enumerate_live(InfluenceGraph(2, {{0, 1, 0.3}}));
  ASSERT_EQ(one.size(), 2u);
  EXPECT_DOUBLE_EQ(one[0].weight, 0.7);  // index 0: edge dead
  EXPECT_DOUBLE_EQ(one[1].weight, 0.3);

  const auto mixed = enumerate_live(InfluenceGraph(3, {{0, 1, 0.1}, {1, 2, 0.65}, {2, 0, 0.37}}));
  double sum = 0.0;
  for (const auto& l : mixed) sum += l.weight;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(LiveEdge, EnumerationCap) {
  const InfluenceGraph g = random_graph(1, 8, 21);
  try {
    enumerate_live(g);
    FAIL() << "cap not enforced";
  } catch (const CapExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("21 edges"), std::string::npos);
  }
  EXPECT_NO_THROW(enumerate_live(random_graph(1, 5, 6), 6));
  EXPECT_THROW(enumerate_live(random_graph(1, 5, 6), 5), CapExceeded);
  EXPECT_THROW(LiveEdgeEnumeration{g}, CapExceeded);
  EXPECT_THROW(spread_exact(g, {0}), CapExceeded);
}

TEST(Reach, Examples) {
  const InfluenceGraph g = abc(0.5);
  const LiveEdgeGraph first_only{{true, false}, 0.25};
  EXPECT_EQ(reach(g, {0}, first_only), (NodeSet{0, 1}));
  EXPECT_EQ(reach(g, {}, first_only), NodeSet{});
  const InfluenceGraph cyc = generate({Family::cycle, 5, 0, true, ProbabilityRule::constant(0.5)}, 1);
  const LiveEdgeGraph all{std::vector<bool>(cyc.m(), true), 1.0};
  for (NodeId v = 0; v < 5; ++v) EXPECT_EQ(reach(cyc, {v}, all), (NodeSet{0, 1, 2, 3, 4}));
  EXPECT_THROW(reach(g, {3}, all), InvalidArgument);
}

TEST(Reach, EnumerationMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const InfluenceGraph g = random_graph(seed, 6, 9);
    const LiveEdgeEnumeration model(g);
    const oracle::Brute brute(g);
    for (std::size_t idx = 0; idx < model.size(); ++idx) {
      EXPECT_NEAR(model.weight(idx), brute.weight(idx), 1e-15);
      for (NodeId v = 0; v < 6; ++v) {
        EXPECT_EQ(model.reach(idx, v), brute.reach(idx, bit(v)));
        EXPECT_EQ(to_mask(reach(g, {v}, model.live_graph(idx))), model.reach(idx, v));
      }
      EXPECT_EQ(model.reach(idx, NodeMask{0b100101}), brute.reach(idx, 0b100101));
    }
  }
}

TEST(Spread, Examples) {
  const InfluenceGraph two(2, {{0, 1, 0.5}});
  EXPECT_NEAR(spread_exact(two, {0}), 1.5, 1e-12);
  EXPECT_NEAR(spread_exact(two, {1}), 1.0, 1e-12);
  EXPECT_NEAR(spread_exact(abc(0.5), {0}), 1.75, 1e-12);
  EXPECT_EQ(spread_exact(abc(0.5), {}), 0.0);
}

TEST(Spread, ExactRoutesAgreeWithBruteForce) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const InfluenceGraph g = random_graph(seed, 5, 1 + seed % 10);
    const LiveEdgeEnumeration model(g);
    const oracle::Brute brute(g);
    for (NodeMask s = 0; s < 32; ++s) {
      const double want = brute.spread(s);
      EXPECT_NEAR(model.spread(s), want, 1e-9);
      EXPECT_NEAR(spread_exact(g, to_set(s)), want, 1e-9);
    }
  }
}

TEST(Spread, MonotoneAndSubmodular) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const InfluenceGraph g = random_graph(seed, 6, 10);
    const LiveEdgeEnumeration model(g);
    std::vector<double> sigma(64);
    for (NodeMask s = 0; s < 64; ++s) sigma[s] = model.spread(s);
    for (NodeMask a = 0; a < 64; ++a) {
      for (NodeMask b = a;; b = (b + 1) | a) {  // every superset of a
        EXPECT_LE(sigma[a], sigma[b] + 1e-12);
        for (NodeId v = 0; v < 6; ++v) {
          if (contains(b, v)) continue;
          EXPECT_GE(sigma[a | bit(v)] - sigma[a], sigma[b | bit(v)] - sigma[b] - 1e-12);
        }
        if (b == 63) break;
      }
    }
  }
}

TEST(SpreadMc, DeterministicCases) {
  const InfluenceGraph g = generate({Family::in_arborescence, 6, 0, true, ProbabilityRule::constant(1.0)}, 4);
  // the root is the node without out-edges; reversed, every node reaches it
  const InfluenceGraph rev = [&] {
    std::vector<Edge> e;
    for (const Edge& x : g.edges()) e.push_back({x.dst, x.src, x.prob});
    return InfluenceGraph(g.n(), e);
  }();
  NodeId root = 0;
  for (NodeId v = 0; v < g.n(); ++v) {
    if (g.out_edges(v).empty()) root = v;
  }
  const SpreadEstimate est = spread_mc(rev, {root}, 500, 1);
  EXPECT_EQ(est.mean, 6.0);
  EXPECT_EQ(est.std_error, 0.0);
  EXPECT_EQ(spread_mc(rev, {}, 100, 1).mean, 0.0);
  EXPECT_THROW(spread_mc(rev, {0}, 0, 1), InvalidArgument);
}

TEST(SpreadMc, TwoNodeWithinFourStandardErrors) {
  const InfluenceGraph two(2, {{0, 1, 0.5}});
  const SpreadEstimate est = spread_mc(two, {0}, 10000, 7);
  EXPECT_EQ(est.samples, 10000u);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_NEAR(est.mean, 1.5, 4 * est.std_error);
}

TEST(SpreadMc, IndependentOfWorkerCount) {
  const InfluenceGraph g = random_graph(5, 6, 12);
  const SpreadEstimate one = spread_mc(g, {0, 3}, 5000, 99, 1);
  for (std::size_t w : {2, 3, 8}) {
    const SpreadEstimate many = spread_mc(g, {0, 3}, 5000, 99, w);
    EXPECT_EQ(one.mean, many.mean);
    EXPECT_EQ(one.std_error, many.std_error);
  }
  EXPECT_NE(spread_mc(g, {0, 3}, 5000, 100).mean, one.mean);
}

TEST(Rounds, Examples) {
  Rng rng(1);
  const DiffusionTrace all = simulate_rounds(abc(1.0), {0}, rng);
  ASSERT_EQ(all.layers.size(), 3u);
  EXPECT_EQ(all.layers[0], NodeSet{0});
  EXPECT_EQ(all.layers[1], NodeSet{1});
  EXPECT_EQ(all.layers[2], NodeSet{2});
  const DiffusionTrace none = simulate_rounds(abc(0.0), {0, 2}, rng);
  ASSERT_EQ(none.layers.size(), 1u);
  EXPECT_EQ(none.layers[0], (NodeSet{0, 2}));
  EXPECT_THROW(simulate_rounds(abc(0.5), {}, rng), InvalidArgument);
}

TEST(Rounds, LayersPartitionTheReachSet) {
  Rng rng(17);
  for (int run = 0; run < 200; ++run) {
    const InfluenceGraph g = random_graph(static_cast<std::uint64_t>(run % 10), 6, 12);
    const NodeSet seeds{static_cast<NodeId>(run % 6)};
    const DiffusionTrace t = simulate_rounds(g, seeds, rng);
    NodeSet all;
    std::size_t total = 0;
    for (const NodeSet& layer : t.layers) {
      all.insert(all.end(), layer.begin(), layer.end());
      total += layer.size();
    }
    EXPECT_EQ(total, normalized(all).size());  // layers are disjoint
    EXPECT_EQ(normalized(all), reach(g, seeds, t.live));
    // every node of layer r+1 has a live in-edge from layer r
    for (std::size_t r = 1; r < t.layers.size(); ++r) {
      for (NodeId v : t.layers[r]) {
        bool fed = false;
        for (std::size_t e : g.in_edges(v)) {
          const NodeId u = g.edge(e).src;
          fed = fed || (t.live.live[e] && std::binary_search(t.layers[r - 1].begin(), t.layers[r - 1].end(), u));
        }
        EXPECT_TRUE(fed);
      }
    }
  }
}
