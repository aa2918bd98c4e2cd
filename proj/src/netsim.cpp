#include "fastgm/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fastgm/error.hpp"
#include "fastgm/estimate.hpp"
#include "fastgm/stream.hpp"

namespace fastgm {

namespace {

constexpr std::uint64_t kSchemeTag = 0x736b6574ULL;  // "sket"
constexpr std::uint64_t kSizeTag = 0x73697a65ULL;    // "size"
constexpr std::uint64_t kLossTag = 0x6c6f7373ULL;    // "loss"

std::size_t index_of(std::uint32_t layer, Chain chain) {
  return 2 * static_cast<std::size_t>(layer - 1) + static_cast<std::size_t>(chain);
}

std::optional<GumbelMaxSketch> sketch_packets(const std::vector<Packet>& packets, std::uint32_t k,
                                              const SeedScheme& scheme, bool unit) {
  if (packets.empty()) return std::nullopt;
  StreamSketchState state(k, scheme, /*skip_duplicates=*/false);
  for (const auto& p : packets) state.update({p.id, unit ? 1.0 : p.size});
  return state.finalize();
}

std::optional<GumbelMaxSketch> merge_optional(const std::optional<GumbelMaxSketch>& a,
                                              const std::optional<GumbelMaxSketch>& b) {
  if (a && b) return merge(*a, *b);
  return a ? a : b;
}

std::vector<Packet> union_sorted(const std::vector<Packet>& a, const std::vector<Packet>& b) {
  std::vector<Packet> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                 [](const Packet& x, const Packet& y) { return x.id < y.id; });
  return out;
}

double total_size(const std::vector<Packet>& packets) {
  double sum = 0.0;
  for (const auto& p : packets) sum += p.size;
  return sum;
}

double intersection_size(const std::vector<Packet>& a, const std::vector<Packet>& b) {
  std::vector<Packet> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                        [](const Packet& x, const Packet& y) { return x.id < y.id; });
  return total_size(out);
}

double difference_size(const std::vector<Packet>& a, const std::vector<Packet>& b) {
  std::vector<Packet> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                      [](const Packet& x, const Packet& y) { return x.id < y.id; });
  return total_size(out);
}

}  // namespace

void validate(const BraidNetConfig& config) {
  if (config.d < 2) throw Error(ErrorCode::kInvalidConfig, "braided chain needs d >= 2");
  if (!(config.p1 >= 0.0 && config.p1 <= 1.0) || !(config.p2 >= 0.0 && config.p2 <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "link probabilities must lie in [0,1]");
  }
  if (config.n == 0) throw Error(ErrorCode::kInvalidConfig, "sources need n >= 1 packets");
  if (config.k < 2) throw Error(ErrorCode::kInvalidConfig, "network queries need k >= 2");
}

const NodeState& Simulation::node(std::uint32_t layer, Chain chain) const {
  if (layer < 1 || layer > config.d) {
    throw Error(ErrorCode::kInvalidConfig, "layer " + std::to_string(layer) + " outside [1, " +
                                               std::to_string(config.d) + "]");
  }
  return nodes[index_of(layer, chain)];
}

Simulation simulate(const BraidNetConfig& config) {
  validate(config);
  Simulation sim;
  sim.config = config;
  sim.scheme = SeedScheme{hash3(config.seed, kSchemeTag, 0)};
  sim.nodes.resize(2 * static_cast<std::size_t>(config.d));

  const std::vector<double> sizes =
      draw_weights(2 * static_cast<std::size_t>(config.n), config.weight_dist,
                   hash3(config.seed, kSizeTag, 0));
  for (Chain chain : {Chain::kA, Chain::kB}) {
    NodeState& source = sim.nodes[index_of(1, chain)];
    source.layer = 1;
    source.chain = chain;
    const std::size_t offset = chain == Chain::kA ? 0 : config.n;
    for (std::size_t i = 0; i < config.n; ++i) {
      source.received.push_back({static_cast<ElementId>(offset + i + 1), sizes[offset + i]});
    }
    source.weighted_sketch = sketch_packets(source.received, config.k, sim.scheme, false);
    source.unit_sketch = sketch_packets(source.received, config.k, sim.scheme, true);
  }

  std::mt19937_64 loss_rng(hash3(config.seed, kLossTag, 0));
  std::bernoulli_distribution same_link(config.p1);
  std::bernoulli_distribution cross_link(config.p2);
  for (std::uint32_t layer = 1; layer < config.d; ++layer) {
    // delivered[from][to]
    std::array<std::array<std::vector<Packet>, 2>, 2> delivered;
    for (Chain from : {Chain::kA, Chain::kB}) {
      const auto f = static_cast<std::size_t>(from);
      for (const Packet& p : sim.nodes[index_of(layer, from)].received) {
        if (same_link(loss_rng)) delivered[f][f].push_back(p);
        if (cross_link(loss_rng)) delivered[f][1 - f].push_back(p);
      }
    }
    for (Chain to : {Chain::kA, Chain::kB}) {
      const auto t = static_cast<std::size_t>(to);
      NodeState& node = sim.nodes[index_of(layer + 1, to)];
      node.layer = layer + 1;
      node.chain = to;
      node.received = union_sorted(delivered[0][t], delivered[1][t]);
      for (bool unit : {false, true}) {
        auto merged = merge_optional(sketch_packets(delivered[0][t], config.k, sim.scheme, unit),
                                     sketch_packets(delivered[1][t], config.k, sim.scheme, unit));
        (unit ? node.unit_sketch : node.weighted_sketch) = std::move(merged);
      }
    }
  }
  return sim;
}

std::pair<std::optional<GumbelMaxSketch>, std::optional<GumbelMaxSketch>> rebuild_sketches(
    const Simulation& sim, const NodeState& node) {
  return {sketch_packets(node.received, sim.config.k, sim.scheme, false),
          sketch_packets(node.received, sim.config.k, sim.scheme, true)};
}

std::string to_string(Query query) {
  switch (query) {
    case Query::kFromA: return "from_a";
    case Query::kFromB: return "from_b";
    case Query::kMeanSize: return "mean_size";
    case Query::kLostFromA: return "lost_from_a";
    case Query::kCrossJaccard: return "cross_jw";
  }
  return "unknown";
}

std::vector<QueryCell> query_node(const Simulation& sim, std::uint32_t layer,
                                  const std::vector<Query>& queries) {
  const NodeState& a1 = sim.node(1, Chain::kA);
  const NodeState& b1 = sim.node(1, Chain::kB);
  const NodeState& al = sim.node(layer, Chain::kA);
  const NodeState& bl = sim.node(layer, Chain::kB);
  const double rel = std::sqrt(2.0 / sim.config.k);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Standard deviation of c(x) + c(y) - c(x u y) with independent errors.
  auto intersection_sigma = [rel](double cx, double cy, double cu) {
    return rel * std::sqrt(cx * cx + cy * cy + cu * cu);
  };

  std::vector<QueryCell> cells;
  cells.reserve(queries.size());
  for (Query q : queries) {
    QueryCell cell{q, 0.0, nan, nan, false};
    switch (q) {
      case Query::kFromA:
      case Query::kFromB: {
        const NodeState& src = q == Query::kFromA ? a1 : b1;
        cell.exact = intersection_size(src.received, al.received);
        if (al.weighted_sketch) {
          cell.estimate =
              estimate_set_algebra(*src.weighted_sketch, *al.weighted_sketch).intersection_w;
          cell.sigma = intersection_sigma(total_size(src.received), total_size(al.received),
                                          total_size(union_sorted(src.received, al.received)));
          cell.defined = true;
        }
        break;
      }
      case Query::kMeanSize: {
        if (!al.received.empty()) cell.exact = total_size(al.received) / al.received.size();
        if (al.weighted_sketch) {
          cell.estimate = estimate_cardinality(*al.weighted_sketch).value /
                          estimate_cardinality(*al.unit_sketch).value;
          // Ratio of two estimates, each with relative variance 2/k.
          cell.sigma = cell.exact * std::sqrt(2.0) * rel;
          cell.defined = true;
        }
        break;
      }
      case Query::kLostFromA: {
        const auto seen = union_sorted(al.received, bl.received);
        cell.exact = difference_size(a1.received, seen);
        if (al.weighted_sketch && bl.weighted_sketch) {
          const GumbelMaxSketch others[] = {*al.weighted_sketch, *bl.weighted_sketch};
          cell.estimate = estimate_difference(*a1.weighted_sketch, others);
          const double c_all = total_size(union_sorted(a1.received, seen));
          const double c_seen = total_size(seen);
          cell.sigma = rel * std::sqrt(c_all * c_all + c_seen * c_seen);
          cell.defined = true;
        }
        break;
      }
      case Query::kCrossJaccard: {
        const double inter = intersection_size(al.received, bl.received);
        const double uni = total_size(union_sorted(al.received, bl.received));
        cell.exact = uni > 0.0 ? inter / uni : 0.0;
        if (al.weighted_sketch && bl.weighted_sketch) {
          cell.estimate = estimate_set_algebra(*al.weighted_sketch, *bl.weighted_sketch).jaccard_w;
          const double s_inter =
              intersection_sigma(total_size(al.received), total_size(bl.received), uni);
          const double s_union = rel * uni;
          cell.sigma = std::sqrt(s_inter * s_inter + cell.exact * cell.exact * s_union * s_union) / uni;
          cell.defined = true;
        }
        break;
      }
    }
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace fastgm
