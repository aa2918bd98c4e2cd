#include "fastgm/randgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fastgm/error.hpp"

namespace fastgm {

namespace {

constexpr std::uint64_t kSeedInject = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kFirstInject = 0xc2b2ae3d27d4eb4fULL;
constexpr std::uint64_t kSecondInject = 0x165667b19e3779f9ULL;
constexpr std::uint64_t kRetryInject = 0xd6e8feb86659fd93ULL;

constexpr double kTwoPowMinus52 = 0x1.0p-52;

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t h = mix64(seed + kSeedInject);
  h = mix64(h ^ (a * kFirstInject));
  h = mix64(h ^ (b * kSecondInject));
  return h;
}

std::uint64_t SeedScheme::fingerprint() const noexcept {
  return mix64(global_seed ^ mix64(stream_salt + kSeedInject));
}

double uniform_open(const SeedScheme& scheme, ElementId element, std::uint32_t step) noexcept {
  const std::uint64_t h = hash3(scheme.global_seed, element, step);
  // (h >> 12) + 0.5 is exact in a double, so the product never rounds to 0 or 1.
  return (static_cast<double>(h >> 12) + 0.5) * kTwoPowMinus52;
}

std::uint32_t uniform_int(const SeedScheme& scheme, ElementId element, std::uint32_t step,
                          std::uint32_t lo, std::uint32_t hi) noexcept {
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - lo + 1;
  std::uint64_t word = hash3(scheme.global_seed ^ scheme.stream_salt, element, step);
  if (range == 1) return lo;
  // Reject the low 2^64 mod range words so the modulo is exact.
  const std::uint64_t threshold = (0 - range) % range;
  while (word < threshold) word = mix64(word + kRetryInject);
  return lo + static_cast<std::uint32_t>(word % range);
}

PartialPermutation::PartialPermutation(std::uint32_t k, bool dense) : k_(k) {
  if (dense) densify();
}

std::uint32_t PartialPermutation::get(std::uint32_t pos) const {
  if (dense_) return values_[pos];
  for (const auto& [p, v] : moved_) {
    if (p == pos) return v;
  }
  return pos;
}

void PartialPermutation::set(std::uint32_t pos, std::uint32_t value) {
  if (dense_) {
    values_[pos] = value;
    return;
  }
  auto it = std::find_if(moved_.begin(), moved_.end(),
                         [pos](const auto& entry) { return entry.first == pos; });
  if (value == pos) {
    if (it != moved_.end()) {
      *it = moved_.back();
      moved_.pop_back();
    }
    return;
  }
  if (it != moved_.end()) {
    it->second = value;
  } else {
    moved_.emplace_back(pos, value);
    if (moved_.size() > kSparseLimit) densify();
  }
}

void PartialPermutation::densify() {
  values_.resize(k_);
  std::iota(values_.begin(), values_.end(), 0u);
  for (const auto& [p, v] : moved_) values_[p] = v;
  moved_.clear();
  moved_.shrink_to_fit();
  dense_ = true;
}

std::uint32_t PartialPermutation::draw(std::uint32_t pos, std::uint32_t target) {
  if (dense_) {
    std::swap(values_[pos], values_[target]);
    return values_[pos];
  }
  const std::uint32_t at_target = get(target);
  if (target != pos) {
    const std::uint32_t at_pos = get(pos);
    // pos is never read again; drop it before writing target.
    set(pos, pos);
    set(target, at_pos);
  } else {
    set(pos, pos);
  }
  return at_target;
}

ElementQueue::ElementQueue(ElementId element, double weight, std::uint32_t k,
                           bool dense_permutation)
    : element_(element), weight_(weight), k_(k), perm_(k, dense_permutation) {
  if (k == 0) throw Error(ErrorCode::kInvalidK, "queue needs k >= 1");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(ErrorCode::kInvalidWeight, "queue weight must be positive and finite");
  }
}

Arrival ElementQueue::next(const SeedScheme& scheme) {
  if (emitted_ == k_) {
    throw Error(ErrorCode::kExhaustedQueue,
                "element " + std::to_string(element_) + " already released all customers");
  }
  ++emitted_;  // 1-based step z
  const double u = uniform_open(scheme, element_, emitted_);
  const double spacing = -std::log(u) / static_cast<double>(k_ - emitted_ + 1);
  time_ += spacing / weight_;
  const std::uint32_t target = uniform_int(scheme, element_, emitted_, emitted_ - 1, k_ - 1);
  const std::uint32_t server = perm_.draw(emitted_ - 1, target);
  return Arrival{time_, server};
}

}  // namespace fastgm
