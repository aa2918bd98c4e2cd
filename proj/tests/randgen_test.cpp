#include "fastgm/randgen.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "fastgm/error.hpp"

using namespace fastgm;

namespace {

// Independent expansion of the order statistic: the z-th arrival is
// (1/v) * sum_{n<=z} -ln(u_n) / (k - n + 1), summed from scratch each time.
std::vector<double> prefix_sum_oracle(const SeedScheme& scheme, ElementId id, double v,
                                      std::uint32_t k) {
  std::vector<double> times;
  for (std::uint32_t z = 1; z <= k; ++z) {
    double sum = 0.0;
    for (std::uint32_t n = 1; n <= z; ++n) {
      sum += -std::log(uniform_open(scheme, id, n)) / static_cast<double>(k - n + 1);
    }
    times.push_back(sum / v);
  }
  return times;
}

// Plain dense Fisher-Yates driven by the same integer stream.
std::vector<std::uint32_t> dense_shuffle_oracle(const SeedScheme& scheme, ElementId id,
                                                std::uint32_t k) {
  std::vector<std::uint32_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::uint32_t z = 1; z <= k; ++z) {
    const std::uint32_t j = uniform_int(scheme, id, z, z - 1, k - 1);
    std::swap(perm[z - 1], perm[j]);
  }
  return perm;
}

}  // namespace

TEST(UniformOpen, DeterministicAndKeyed) {
  const SeedScheme scheme{42};
  EXPECT_EQ(uniform_open(scheme, 7, 3), uniform_open(scheme, 7, 3));
  EXPECT_NE(uniform_open(scheme, 7, 3), uniform_open(scheme, 7, 4));
  EXPECT_NE(uniform_open(scheme, 7, 3), uniform_open(scheme, 8, 3));
  EXPECT_NE(uniform_open(scheme, 7, 3), uniform_open(SeedScheme{43}, 7, 3));
}

TEST(UniformOpen, MeanOverMillionDrawsIsHalf) {
  const SeedScheme scheme{2024};
  double sum = 0.0;
  double lo = 1.0, hi = 0.0;
  constexpr int kDraws = 1'000'000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = uniform_open(scheme, static_cast<ElementId>(i / 1000 + 1),
                                  static_cast<std::uint32_t>(i % 1000 + 1));
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_NEAR(sum / kDraws, 0.5, 0.01);
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
}

TEST(UniformInt, StaysInRangeAndIsBalanced) {
  const SeedScheme scheme{5};
  std::vector<int> counts(7, 0);
  constexpr int kDraws = 70'000;
  for (int i = 0; i < kDraws; ++i) {
    const auto x = uniform_int(scheme, static_cast<ElementId>(i + 1), 1, 3, 9);
    ASSERT_GE(x, 3u);
    ASSERT_LE(x, 9u);
    ++counts[x - 3];
  }
  // Chi-squared with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - kDraws / 7.0) * (c - kDraws / 7.0) / (kDraws / 7.0);
  EXPECT_LT(chi2, 22.46);
  EXPECT_EQ(uniform_int(scheme, 1, 1, 4, 4), 4u);
}

TEST(PartialPermutation, SparseMatchesDense) {
  for (std::uint32_t k : {1u, 2u, 7u, 64u, 300u}) {
    PartialPermutation sparse(k, false);
    PartialPermutation dense(k, true);
    const SeedScheme scheme{k};
    std::vector<std::uint32_t> from_sparse, from_dense;
    for (std::uint32_t pos = 0; pos < k; ++pos) {
      const auto target = uniform_int(scheme, 99, pos + 1, pos, k - 1);
      from_sparse.push_back(sparse.draw(pos, target));
      from_dense.push_back(dense.draw(pos, target));
    }
    EXPECT_EQ(from_sparse, from_dense) << "k=" << k;
  }
}

TEST(ElementQueue, SingleServerArrival) {
  const SeedScheme scheme{11};
  ElementQueue q(5, 2.5, 1);
  const Arrival a = q.next(scheme);
  EXPECT_DOUBLE_EQ(a.time, -std::log(uniform_open(scheme, 5, 1)) / 2.5);
  EXPECT_EQ(a.server, 0u);
  EXPECT_TRUE(q.exhausted());
}

TEST(ElementQueue, ExhaustedQueueThrows) {
  const SeedScheme scheme{1};
  ElementQueue q(1, 1.0, 2);
  q.next(scheme);
  q.next(scheme);
  try {
    q.next(scheme);
    FAIL() << "expected an exhausted-queue error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExhaustedQueue);
  }
}

TEST(ElementQueue, DoubledWeightHalvesEveryTime) {
  const SeedScheme scheme{77};
  ElementQueue slow(3, 0.37, 50);
  ElementQueue fast(3, 0.74, 50);
  while (!slow.exhausted()) {
    const Arrival a = slow.next(scheme);
    const Arrival b = fast.next(scheme);
    EXPECT_EQ(b.time, a.time / 2.0);
    EXPECT_EQ(b.server, a.server);
  }
}

TEST(ElementQueue, FullRunMatchesPrefixSumAndShuffleOracles) {
  const SeedScheme scheme{31337};
  for (std::uint32_t k : {4u, 33u, 256u}) {
    const double v = 0.8;
    const auto times = prefix_sum_oracle(scheme, 9, v, k);
    const auto perm = dense_shuffle_oracle(scheme, 9, k);
    ElementQueue q(9, v, k);
    std::set<std::uint32_t> servers;
    double previous = 0.0;
    for (std::uint32_t z = 0; z < k; ++z) {
      const Arrival a = q.next(scheme);
      EXPECT_NEAR(a.time, times[z], 1e-12 * times[z]) << "k=" << k << " z=" << z;
      EXPECT_EQ(a.server, perm[z]);
      EXPECT_GT(a.time, previous);
      previous = a.time;
      servers.insert(a.server);
    }
    EXPECT_EQ(servers.size(), k);
    EXPECT_EQ(*servers.rbegin(), k - 1);
  }
}

TEST(ElementQueue, FirstArrivalIsExponentialWithRateKv) {
  // min of k EXP(v) variables is EXP(k v); Kolmogorov-Smirnov over 1e5 seeds.
  constexpr int kSeeds = 100'000;
  constexpr std::uint32_t k = 16;
  constexpr double v = 0.6;
  std::vector<double> samples;
  samples.reserve(kSeeds);
  for (int s = 0; s < kSeeds; ++s) {
    ElementQueue q(1, v, k);
    samples.push_back(q.next(SeedScheme{static_cast<std::uint64_t>(s)}).time);
  }
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  for (int i = 0; i < kSeeds; ++i) {
    const double cdf = 1.0 - std::exp(-(k * v) * samples[i]);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / kSeeds),
                   std::abs(cdf - static_cast<double>(i + 1) / kSeeds)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(ElementQueue, ServersDoNotDependOnWeight) {
  const SeedScheme scheme{8};
  ElementQueue a(12, 1e-3, 40);
  ElementQueue b(12, 1e3, 40);
  while (!a.exhausted()) EXPECT_EQ(a.next(scheme).server, b.next(scheme).server);
}

TEST(ElementQueue, RejectsBadWeight) {
  EXPECT_THROW(ElementQueue(1, 0.0, 4), Error);
  EXPECT_THROW(ElementQueue(1, -1.0, 4), Error);
  EXPECT_THROW(ElementQueue(1, 1.0, 0), Error);
}
