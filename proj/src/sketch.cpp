#include "fastgm/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fastgm/error.hpp"

namespace fastgm {

namespace {

void validate_weight(ElementId id, double w) {
  if (id == 0) throw Error(ErrorCode::kInvalidElement, "element ids start at 1");
  if (!std::isfinite(w) || !(w >= kMinWeight)) {
    throw Error(ErrorCode::kInvalidWeight,
                "element " + std::to_string(id) + " has weight " + std::to_string(w));
  }
}

void validate_inputs(const WeightedVector& v, const GenerationParams& params) {
  if (params.k == 0) throw Error(ErrorCode::kInvalidK, "k must be >= 1");
  if (v.empty()) throw Error(ErrorCode::kEmptyVector, "cannot sketch an empty vector");
}

// Release target for a queue with normalized weight `share` at budget R.
std::uint32_t release_target(std::uint64_t budget, double share, std::uint32_t k) {
  const double target = std::ceil(static_cast<double>(budget) * share);
  return target >= static_cast<double>(k) ? k : static_cast<std::uint32_t>(target);
}

}  // namespace

WeightedVector::WeightedVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    validate_weight(entries_[i].first, entries_[i].second);
    if (i > 0 && entries_[i].first == entries_[i - 1].first) {
      throw Error(ErrorCode::kDuplicateElement,
                  "element " + std::to_string(entries_[i].first) + " appears twice");
    }
  }
  // Neumaier summation keeps weight_sum within ~1 ulp of the exact sum.
  double sum = 0.0;
  double carry = 0.0;
  for (const auto& [id, w] : entries_) {
    const double t = sum + w;
    carry += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
    sum = t;
  }
  weight_sum_ = sum + carry;
}

WeightedVector WeightedVector::from_dense(std::span<const double> weights) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    entries.emplace_back(static_cast<ElementId>(i + 1), weights[i]);
  }
  return WeightedVector(std::move(entries));
}

std::optional<double> WeightedVector::weight(ElementId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, ElementId key) { return e.first < key; });
  if (it == entries_.end() || it->first != id) return std::nullopt;
  return it->second;
}

WeightedVector WeightedVector::scaled(double factor) const {
  std::vector<Entry> out(entries_);
  for (auto& e : out) e.second *= factor;
  return WeightedVector(std::move(out));
}

GumbelMaxSketch::GumbelMaxSketch(std::uint64_t scheme_fingerprint, std::vector<ElementId> s,
                                 std::vector<double> y)
    : fingerprint_(scheme_fingerprint), s_(std::move(s)), y_(std::move(y)) {
  if (s_.size() != y_.size()) {
    throw Error(ErrorCode::kMismatchedK, "s and y register arrays differ in length");
  }
  if (s_.empty()) throw Error(ErrorCode::kInvalidK, "sketch needs k >= 1");
  for (double value : y_) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidWeight, "y registers must be positive and finite");
    }
  }
}

double GumbelMaxSketch::gumbel_max(std::uint32_t j) const { return -std::log(y_.at(j)); }

RegisterFile::RegisterFile(std::uint32_t k) : s_(k, 0), y_(k, 0.0), set_(k, 0), unset_(k) {}

bool RegisterFile::offer(const Arrival& a, ElementId element) {
  const std::uint32_t j = a.server;
  if (!set_[j]) {
    set_[j] = 1;
    --unset_;
  } else if (!(a.time < y_[j] || (a.time == y_[j] && element < s_[j]))) {
    return false;
  }
  y_[j] = a.time;
  s_[j] = element;
  return true;
}

std::uint32_t RegisterFile::argmax() const {
  return static_cast<std::uint32_t>(std::max_element(y_.begin(), y_.end()) - y_.begin());
}

std::vector<std::uint32_t> RegisterFile::unset_indices() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 0; j < set_.size(); ++j) {
    if (!set_[j]) out.push_back(j);
  }
  return out;
}

GumbelMaxSketch RegisterFile::to_sketch(std::uint64_t fingerprint) const {
  if (unset_ != 0) {
    throw Error(ErrorCode::kIncompleteSketch,
                std::to_string(unset_) + " registers were never set");
  }
  return GumbelMaxSketch(fingerprint, s_, y_);
}

std::uint64_t compute_ri(std::uint64_t budget, const WeightedVector& v, ElementId element) {
  const auto w = v.weight(element);
  if (!w) {
    throw Error(ErrorCode::kMissingElement,
                "element " + std::to_string(element) + " is not in the vector");
  }
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(budget) * (*w / v.weight_sum())));
}

GumbelMaxSketch sketch_naive(const WeightedVector& v, const GenerationParams& params,
                             GenerationStats* stats) {
  validate_inputs(v, params);
  const std::uint32_t k = params.k;
  RegisterFile regs(k);
  std::uint64_t emitted = 0;
  for (const auto& [id, w] : v.entries()) {
    ElementQueue queue(id, w, k, /*dense_permutation=*/true);
    while (!queue.exhausted()) {
      regs.offer(queue.next(params.scheme), id);
      ++emitted;
    }
  }
  if (stats) *stats = GenerationStats{emitted, 0, 0, 0};
  return regs.to_sketch(params.scheme.fingerprint());
}

GumbelMaxSketch sketch_fastgm(const WeightedVector& v, const GenerationParams& params,
                              GenerationStats* stats) {
  validate_inputs(v, params);
  const std::uint32_t k = params.k;
  const std::uint64_t delta = params.effective_delta();
  const SeedScheme& scheme = params.scheme;
  const double total = v.weight_sum();

  std::vector<ElementQueue> queues;
  std::vector<double> shares;
  queues.reserve(v.n_plus());
  shares.reserve(v.n_plus());
  for (const auto& [id, w] : v.entries()) {
    queues.emplace_back(id, w, k);
    shares.push_back(w / total);
  }

  GenerationStats local;
  RegisterFile regs(k);
  std::vector<std::uint32_t> live(queues.size());
  std::iota(live.begin(), live.end(), 0u);
  std::uint64_t budget = 0;

  // FastSearch: grow the budget until every server has a customer. A fully
  // drained queue covers all k servers, so this terminates.
  while (regs.unset_count() > 0) {
    budget += delta;
    ++local.search_rounds;
    std::size_t kept = 0;
    for (std::uint32_t idx : live) {
      ElementQueue& q = queues[idx];
      const std::uint32_t target = release_target(budget, shares[idx], k);
      while (q.emitted() < target) {
        regs.offer(q.next(scheme), q.element());
        ++local.emitted;
      }
      if (!q.exhausted()) live[kept++] = idx;
    }
    live.resize(kept);
  }

  // FastPrune: a queue closes at its first arrival later than the largest
  // register. Each live queue releases at least one customer per round so
  // that low-weight queues are tested against y* instead of waiting for the
  // budget to reach them.
  std::uint32_t jstar = regs.argmax();
  ++local.argmax_scans;
  while (!live.empty()) {
    budget += delta;
    ++local.prune_rounds;
    std::size_t kept = 0;
    for (std::uint32_t idx : live) {
      ElementQueue& q = queues[idx];
      // Later arrivals can only be larger than the last one released.
      if (q.emitted() > 0 && q.last_time() > regs.y(jstar)) continue;
      const std::uint32_t target =
          std::max(release_target(budget, shares[idx], k), q.emitted() + 1);
      bool closed = false;
      while (q.emitted() < target) {
        const Arrival a = q.next(scheme);
        ++local.emitted;
        if (a.time > regs.y(jstar)) {
          closed = true;
          break;
        }
        if (regs.offer(a, q.element()) && a.server == jstar) {
          jstar = regs.argmax();
          ++local.argmax_scans;
        }
      }
      if (!closed && !q.exhausted()) live[kept++] = idx;
    }
    live.resize(kept);
  }

  if (stats) *stats = local;
  return regs.to_sketch(scheme.fingerprint());
}

}  // namespace fastgm
