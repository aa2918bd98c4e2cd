#pragma once

// Braided-chain sensor network: two relay chains A and B of d layers each.
// Layer 1 holds the two sources. Every node forwards its distinct packet set
// to both nodes of the next layer; a packet crosses a same-chain link with
// probability p1 and a cross-chain link with probability p2, independently
// per packet and per link. Each node summarizes what it received with a
// size-weighted sketch and a unit-weight sketch.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastgm/dataset.hpp"
#include "fastgm/sketch.hpp"

namespace fastgm {

struct BraidNetConfig {
  std::uint32_t d = 30;
  double p1 = 0.9;
  double p2 = 0.1;
  std::uint32_t n = 10000;  // packets per source
  std::uint32_t k = 200;
  Distribution weight_dist = Distribution::kBeta55;
  std::uint64_t seed = 1;
};

void validate(const BraidNetConfig& config);

enum class Chain { kA = 0, kB = 1 };

struct Packet {
  ElementId id;
  double size;
};

struct NodeState {
  std::uint32_t layer;  // 1-based
  Chain chain;
  std::vector<Packet> received;  // distinct, sorted by id
  // Empty node: no sketch.
  std::optional<GumbelMaxSketch> weighted_sketch;
  std::optional<GumbelMaxSketch> unit_sketch;
};

struct Simulation {
  BraidNetConfig config;
  SeedScheme scheme;
  // Node (layer l, chain c) lives at index 2 * (l - 1) + c.
  std::vector<NodeState> nodes;

  const NodeState& node(std::uint32_t layer, Chain chain) const;
};

// Source A emits ids 1..n, source B ids n+1..2n. A node's sketches are the
// merge of per-link sketches of what each upstream link delivered.
Simulation simulate(const BraidNetConfig& config);

// Sketches rebuilt by streaming the node's received set directly.
std::pair<std::optional<GumbelMaxSketch>, std::optional<GumbelMaxSketch>> rebuild_sketches(
    const Simulation& sim, const NodeState& node);

enum class Query { kFromA, kFromB, kMeanSize, kLostFromA, kCrossJaccard };
inline constexpr std::array<Query, 5> kAllQueries = {Query::kFromA, Query::kFromB, Query::kMeanSize,
                                                     Query::kLostFromA, Query::kCrossJaccard};
std::string to_string(Query query);

// One (estimate, exact) cell. `sigma` is the standard deviation predicted by
// propagating Var(c_hat / c) = 2/k through the estimator; `defined` is false
// when an input node was empty, in which case estimate is NaN.
struct QueryCell {
  Query query;
  double exact;
  double estimate;
  double sigma;
  bool defined;
};

// Queries at node A of layer `layer`:
//   kFromA        |N_A1 n N_Al|_w
//   kFromB        |N_B1 n N_Al|_w
//   kMeanSize     mean size of distinct packets at A_l
//   kLostFromA    |N_A1 \ (N_Al u N_Bl)|_w
//   kCrossJaccard J_W(N_Al, N_Bl)
// Throws Error(kInvalidConfig) when layer is outside [1, d].
std::vector<QueryCell> query_node(const Simulation& sim, std::uint32_t layer,
                                  const std::vector<Query>& queries = {kAllQueries.begin(),
                                                                      kAllQueries.end()});

}  // namespace fastgm
