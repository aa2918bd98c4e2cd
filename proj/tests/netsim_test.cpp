#include "fastgm/netsim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fastgm/error.hpp"
#include "fastgm/estimate.hpp"

using namespace fastgm;

namespace {

BraidNetConfig small_config() {
  BraidNetConfig config;
  config.d = 8;
  config.n = 400;
  config.k = 64;
  config.seed = 11;
  return config;
}

double mass(const std::vector<Packet>& packets) {
  return std::accumulate(packets.begin(), packets.end(), 0.0,
                         [](double acc, const Packet& p) { return acc + p.size; });
}

QueryCell cell(const std::vector<QueryCell>& cells, Query q) {
  for (const auto& c : cells) {
    if (c.query == q) return c;
  }
  ADD_FAILURE() << "query missing";
  return {};
}

}  // namespace

TEST(BraidNetConfig, Validation) {
  BraidNetConfig config;
  EXPECT_NO_THROW(validate(config));
  config.d = 1;
  EXPECT_THROW(validate(config), Error);
  config = {};
  config.p1 = 1.5;
  EXPECT_THROW(validate(config), Error);
  config = {};
  config.p2 = -0.1;
  EXPECT_THROW(validate(config), Error);
  config = {};
  config.k = 1;
  EXPECT_THROW(validate(config), Error);
  config = {};
  config.n = 0;
  EXPECT_THROW(simulate(config), Error);
}

TEST(Simulate, LosslessIsolatedChains) {
  auto config = small_config();
  config.p1 = 1.0;
  config.p2 = 0.0;
  const auto sim = simulate(config);
  const auto& a1 = sim.node(1, Chain::kA);
  const auto& b1 = sim.node(1, Chain::kB);
  ASSERT_EQ(a1.received.size(), 400u);
  EXPECT_EQ(a1.received.front().id, 1u);
  EXPECT_EQ(b1.received.front().id, 401u);
  for (std::uint32_t layer = 2; layer <= config.d; ++layer) {
    const auto& a = sim.node(layer, Chain::kA);
    ASSERT_EQ(a.received.size(), a1.received.size());
    EXPECT_EQ(*a.weighted_sketch, *a1.weighted_sketch);
    EXPECT_EQ(*sim.node(layer, Chain::kB).unit_sketch, *b1.unit_sketch);
    const auto cells = query_node(sim, layer);
    EXPECT_DOUBLE_EQ(cell(cells, Query::kFromA).exact, mass(a1.received));
    EXPECT_EQ(cell(cells, Query::kFromB).exact, 0.0);
    EXPECT_EQ(cell(cells, Query::kLostFromA).exact, 0.0);
    EXPECT_EQ(cell(cells, Query::kCrossJaccard).exact, 0.0);
  }
}

TEST(Simulate, TotalLossEmptiesDownstream) {
  auto config = small_config();
  config.p1 = 0.0;
  config.p2 = 0.0;
  const auto sim = simulate(config);
  for (std::uint32_t layer = 2; layer <= config.d; ++layer) {
    const auto& a = sim.node(layer, Chain::kA);
    EXPECT_TRUE(a.received.empty());
    EXPECT_FALSE(a.weighted_sketch.has_value());
    for (const auto& c : query_node(sim, layer)) {
      EXPECT_FALSE(c.defined) << to_string(c.query);
      EXPECT_TRUE(std::isnan(c.estimate));
      if (c.query != Query::kLostFromA) {
        EXPECT_EQ(c.exact, 0.0) << to_string(c.query);
      }
    }
    EXPECT_DOUBLE_EQ(cell(query_node(sim, layer), Query::kLostFromA).exact,
                     mass(sim.node(1, Chain::kA).received));
  }
}

TEST(Simulate, SourceLayerQueries) {
  const auto sim = simulate(small_config());
  const auto cells = query_node(sim, 1);
  const double a_mass = mass(sim.node(1, Chain::kA).received);
  EXPECT_DOUBLE_EQ(cell(cells, Query::kFromA).exact, a_mass);
  EXPECT_EQ(cell(cells, Query::kFromB).exact, 0.0);
  EXPECT_EQ(cell(cells, Query::kCrossJaccard).exact, 0.0);
  EXPECT_EQ(cell(cells, Query::kLostFromA).exact, 0.0);
  EXPECT_NEAR(cell(cells, Query::kMeanSize).exact, 0.5, 0.05);
  // Identical source sketch on both sides of the intersection.
  EXPECT_EQ(cell(cells, Query::kFromA).estimate,
            estimate_cardinality(*sim.node(1, Chain::kA).weighted_sketch).value);
}

TEST(Simulate, MergedSketchesMatchRebuiltOnes) {
  const auto sim = simulate(small_config());
  for (const auto& node : sim.nodes) {
    const auto [weighted, unit] = rebuild_sketches(sim, node);
    ASSERT_EQ(weighted.has_value(), node.weighted_sketch.has_value());
    if (weighted) {
      EXPECT_EQ(*weighted, *node.weighted_sketch) << "layer " << node.layer;
      EXPECT_EQ(*unit, *node.unit_sketch) << "layer " << node.layer;
    }
  }
}

TEST(Simulate, ReceivedSetsAreSortedAndDistinct) {
  const auto sim = simulate(small_config());
  for (const auto& node : sim.nodes) {
    for (std::size_t i = 1; i < node.received.size(); ++i) {
      ASSERT_LT(node.received[i - 1].id, node.received[i].id);
    }
  }
}

TEST(Simulate, SourceAMassNeverGrows) {
  auto config = small_config();
  config.d = 20;
  const auto sim = simulate(config);
  double previous = INFINITY;
  for (std::uint32_t layer = 1; layer <= config.d; ++layer) {
    const double from_a = cell(query_node(sim, layer, {Query::kFromA}), Query::kFromA).exact;
    const double lost = cell(query_node(sim, layer, {Query::kLostFromA}), Query::kLostFromA).exact;
    EXPECT_LE(from_a, previous);
    EXPECT_LE(lost, mass(sim.node(1, Chain::kA).received) + 1e-9);
    previous = from_a;
  }
}

TEST(Simulate, DeterministicForSeed) {
  const auto a = simulate(small_config());
  const auto b = simulate(small_config());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    EXPECT_EQ(a.nodes[i].weighted_sketch, b.nodes[i].weighted_sketch);
  }
  auto other = small_config();
  other.seed = 12;
  EXPECT_NE(simulate(other).nodes[5].weighted_sketch, a.nodes[5].weighted_sketch);
}

TEST(QueryNode, LayerOutOfRange) {
  const auto sim = simulate(small_config());
  for (std::uint32_t layer : {0u, 9u}) {
    try {
      query_node(sim, layer);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
    }
  }
}

TEST(QueryNode, EstimatesMostlyInsideBands) {
  auto config = small_config();
  config.d = 10;
  config.n = 2000;
  config.k = 200;
  int inside = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    config.seed = seed;
    const auto sim = simulate(config);
    for (std::uint32_t layer = 1; layer <= config.d; ++layer) {
      for (const auto& c : query_node(sim, layer)) {
        if (!c.defined) continue;
        ++total;
        inside += std::abs(c.estimate - c.exact) <= 3.0 * c.sigma + 1e-12 ? 1 : 0;
      }
    }
  }
  ASSERT_GT(total, 100);
  EXPECT_GE(static_cast<double>(inside) / total, 0.95);
}
