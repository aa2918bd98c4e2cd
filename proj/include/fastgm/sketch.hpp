#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastgm/randgen.hpp"

namespace fastgm {

// Weights below this are rejected: 1/weight would overflow.
inline constexpr double kMinWeight = 1e-300;

// Sparse non-negative vector: element id (>= 1) -> strictly positive weight.
// Entries are kept sorted by id.
class WeightedVector {
 public:
  using Entry = std::pair<ElementId, double>;

  WeightedVector() = default;
  // Throws on duplicate ids, id 0, or weights that are not finite and >= kMinWeight.
  explicit WeightedVector(std::vector<Entry> entries);

  // Dense input with 1-based ids; zero entries are skipped, negatives rejected.
  static WeightedVector from_dense(std::span<const double> weights);

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t n_plus() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double weight_sum() const noexcept { return weight_sum_; }
  ElementId max_id() const noexcept { return entries_.empty() ? 0 : entries_.back().first; }

  std::optional<double> weight(ElementId id) const;
  WeightedVector scaled(double factor) const;

  friend bool operator==(const WeightedVector&, const WeightedVector&) = default;

 private:
  std::vector<Entry> entries_;
  double weight_sum_ = 0.0;
};

// k paired registers: s[j] is the winning element, y[j] its arrival time.
// The Gumbel-Max value of register j is -ln y[j].
class GumbelMaxSketch {
 public:
  GumbelMaxSketch() = default;
  GumbelMaxSketch(std::uint64_t scheme_fingerprint, std::vector<ElementId> s,
                  std::vector<double> y);

  std::uint32_t k() const noexcept { return static_cast<std::uint32_t>(s_.size()); }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  std::span<const ElementId> s() const noexcept { return s_; }
  std::span<const double> y() const noexcept { return y_; }
  double gumbel_max(std::uint32_t j) const;

  friend bool operator==(const GumbelMaxSketch&, const GumbelMaxSketch&) = default;

 private:
  std::uint64_t fingerprint_ = 0;
  std::vector<ElementId> s_;
  std::vector<double> y_;
};

struct GenerationParams {
  std::uint32_t k = 128;
  // Per-round increment of the release budget R; 0 means "use k".
  std::uint32_t delta = 0;
  SeedScheme scheme{};

  std::uint32_t effective_delta() const noexcept { return delta == 0 ? k : delta; }
};

struct GenerationStats {
  std::uint64_t emitted = 0;        // order statistics generated
  std::uint64_t search_rounds = 0;  // FastSearch rounds until every register was set
  std::uint64_t prune_rounds = 0;
  std::uint64_t argmax_scans = 0;
};

// Reference generator: releases every customer of every element.
GumbelMaxSketch sketch_naive(const WeightedVector& v, const GenerationParams& params,
                             GenerationStats* stats = nullptr);

// FastSearch + FastPrune. Bit-identical to sketch_naive for the same params.
GumbelMaxSketch sketch_fastgm(const WeightedVector& v, const GenerationParams& params,
                              GenerationStats* stats = nullptr);

// ceil(R * v_element / weight_sum): customers element releases at budget R.
std::uint64_t compute_ri(std::uint64_t budget, const WeightedVector& v, ElementId element);

// Register file shared by the batch and streaming generators.
class RegisterFile {
 public:
  explicit RegisterFile(std::uint32_t k);

  // Applies one arrival. Lower time wins; on exactly equal times the smaller
  // element id wins, so the outcome never depends on processing order.
  // Returns true when the register changed.
  bool offer(const Arrival& a, ElementId element);

  std::uint32_t unset_count() const noexcept { return unset_; }
  std::uint32_t k() const noexcept { return static_cast<std::uint32_t>(y_.size()); }
  bool is_set(std::uint32_t j) const noexcept { return set_[j] != 0; }
  double y(std::uint32_t j) const noexcept { return y_[j]; }
  // Index of the largest register; only meaningful once unset_count() == 0.
  std::uint32_t argmax() const;
  std::vector<std::uint32_t> unset_indices() const;

  GumbelMaxSketch to_sketch(std::uint64_t fingerprint) const;

 private:
  std::vector<ElementId> s_;
  std::vector<double> y_;
  std::vector<std::uint8_t> set_;
  std::uint32_t unset_;
};

// Sketch files. Binary layout (little-endian):
//   "GMSK" | u16 version=1 | u16 reserved=0 | u32 k | u64 fingerprint |
//   k x (u64 s[j], f64 y[j])
// Text layout: "gmsketch 1", "k <k> fingerprint <16 hex digits>", then one
// "<s> <y as C99 hex float>" line per register. Readers accept both.
enum class SketchFormat { kBinary, kText };

void write_sketch(std::ostream& out, const GumbelMaxSketch& sketch,
                  SketchFormat format = SketchFormat::kBinary);
GumbelMaxSketch read_sketch(std::istream& in);
void save_sketch(const std::string& path, const GumbelMaxSketch& sketch,
                 SketchFormat format = SketchFormat::kBinary);
GumbelMaxSketch load_sketch(const std::string& path);

}  // namespace fastgm
