#pragma once

// Seed-consistent randomness for Gumbel-Max sketching.
//
// Every random quantity is a pure function of (seed, element, step): the
// uniform behind the z-th order statistic of element i, and the integer that
// drives the z-th Fisher-Yates swap of element i's server permutation. Two
// vectors sharing element i therefore see the same customers in the same
// order, which is what makes registers comparable across sketches.

#include <cstdint>
#include <utility>
#include <vector>

namespace fastgm {

using ElementId = std::uint64_t;

// Default salt separating the permutation stream from the uniform stream.
inline constexpr std::uint64_t kDefaultStreamSalt = 0x5bd1e9955bd1e995ULL;

struct SeedScheme {
  std::uint64_t global_seed = 0;
  std::uint64_t stream_salt = kDefaultStreamSalt;

  // 64-bit tag stored in sketches so mismatched merges can be rejected.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const SeedScheme&, const SeedScheme&) = default;
};

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Keyed 64-bit hash of (seed, a, b). Each input passes through its own
// odd-multiplier injection followed by a full mix64 round.
std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

// Uniform in the open interval (0,1), keyed by (global_seed, element, step).
// The top 52 bits of the hash form the mantissa and half an ulp is added, so
// the result lies in [2^-53, 1 - 2^-53].
double uniform_open(const SeedScheme& scheme, ElementId element, std::uint32_t step) noexcept;

// Unbiased integer in [lo, hi] keyed by (global_seed ^ stream_salt, element,
// step). Rejection on the 64-bit stream; retries rehash the previous word.
std::uint32_t uniform_int(const SeedScheme& scheme, ElementId element, std::uint32_t step,
                          std::uint32_t lo, std::uint32_t hi) noexcept;

// Fisher-Yates permutation of {0, ..., k-1} that is materialized lazily.
//
// Starts sparse (only displaced positions are stored) and switches to a dense
// array once enough positions have moved. Positions before the current step
// are never read again, so the sparse form drops them as it goes.
class PartialPermutation {
 public:
  PartialPermutation() = default;
  PartialPermutation(std::uint32_t k, bool dense);

  // Performs the swap of step `pos` with `target` (target >= pos) and returns
  // the value that lands at `pos`.
  std::uint32_t draw(std::uint32_t pos, std::uint32_t target);

  std::uint32_t size() const noexcept { return k_; }

 private:
  std::uint32_t get(std::uint32_t pos) const;
  void set(std::uint32_t pos, std::uint32_t value);
  void densify();

  static constexpr std::size_t kSparseLimit = 24;

  std::uint32_t k_ = 0;
  bool dense_ = false;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> moved_;
  std::vector<std::uint32_t> values_;
};

// One customer: arrival time and the server (register index, 0-based) it picked.
struct Arrival {
  double time;
  std::uint32_t server;
};

// Queue of k customers for one element, released in ascending arrival time.
//
// The z-th arrival adds (-ln u_z / (k - z + 1)) / weight to the running time,
// which reproduces the sorted values of k i.i.d. EXP(weight) draws. The
// server of the z-th customer comes from the z-th Fisher-Yates step.
class ElementQueue {
 public:
  ElementQueue(ElementId element, double weight, std::uint32_t k, bool dense_permutation = false);

  // Throws Error(kExhaustedQueue) once all k customers have been released.
  Arrival next(const SeedScheme& scheme);

  ElementId element() const noexcept { return element_; }
  double weight() const noexcept { return weight_; }
  std::uint32_t k() const noexcept { return k_; }
  std::uint32_t emitted() const noexcept { return emitted_; }
  double last_time() const noexcept { return time_; }
  bool exhausted() const noexcept { return emitted_ == k_; }

 private:
  ElementId element_;
  double weight_;
  std::uint32_t k_;
  std::uint32_t emitted_ = 0;
  double time_ = 0.0;
  PartialPermutation perm_;
};

}  // namespace fastgm
