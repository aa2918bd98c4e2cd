#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fastgm/sketch.hpp"

namespace fastgm {

struct SparseDataset {
  std::string name;
  std::size_t feature_dim = 0;  // largest element index seen
  std::vector<WeightedVector> vectors;
};

// Sparse text format: one vector per line, an optional leading label token,
// then "index:value" pairs with 1-based indices and positive values. Blank
// lines and '#' comments are skipped.
SparseDataset parse_sparse(std::istream& in, std::string name = "stdin");
SparseDataset load_sparse(const std::string& path);

enum class Distribution { kUniform01, kExp1, kNormal, kBeta55 };

// Accepts "uniform01"/"uni", "exp1"/"exp", "normal"/"normal(1,0.1)",
// "beta55"/"beta(5,5)".
Distribution parse_distribution(const std::string& name);
std::string to_string(Distribution dist);

// n weights for ids 1..n. Normal is N(1, 0.1^2) with non-positive draws
// rejected; uniform rejects exact zeros.
WeightedVector gen_synthetic(std::size_t n, Distribution dist, std::uint64_t seed);

// Draws positive weights from `dist`; shared helper for the generators.
std::vector<double> draw_weights(std::size_t n, Distribution dist, std::uint64_t seed);

// Two vectors over ids 1..n whose probability Jaccard similarity is `target`
// up to rounding: a shared block with identical weights plus exclusive blocks
// rescaled so that shared / (shared + exclusive) mass equals target. The
// second vector is additionally multiplied by `second_scale`, which leaves the
// similarity unchanged. Requires n >= 3 when 0 < target < 1.
std::pair<WeightedVector, WeightedVector> make_pair_with_jaccard(std::size_t n, double target,
                                                                 Distribution dist,
                                                                 std::uint64_t seed,
                                                                 double second_scale = 1.0);

}  // namespace fastgm
