#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fastgm/sketch.hpp"

namespace fastgm {

struct SimilarityEstimate {
  double value;  // matching registers / k
  std::uint32_t k;
};

struct CardinalityEstimate {
  double value;
  std::uint32_t k;
};

struct SetAlgebraEstimate {
  double union_w;
  double intersection_w;
  double a_minus_b_w;
  double jaccard_w;
};

// Fraction of registers whose s values agree; unbiased for the probability
// Jaccard similarity with variance J(1-J)/k.
SimilarityEstimate estimate_jaccard_p(const GumbelMaxSketch& a, const GumbelMaxSketch& b);

// Sum over shared support of 1 / sum_l max(u_l/u_i, v_l/v_i).
double exact_jaccard_p(const WeightedVector& u, const WeightedVector& v);

// sum min(u_i, v_i) / sum max(u_i, v_i).
double exact_jaccard_w(const WeightedVector& u, const WeightedVector& v);

// (k-1) / sum_j y[j]. Requires k >= 2.
CardinalityEstimate estimate_cardinality(const GumbelMaxSketch& sketch);

// Register-wise minimum; the sketch of the union of the underlying sets.
GumbelMaxSketch merge(std::span<const GumbelMaxSketch> sketches);
GumbelMaxSketch merge(const GumbelMaxSketch& a, const GumbelMaxSketch& b);

// Union, intersection (inclusion-exclusion), a \ b and weighted Jaccard from
// two sketches. Negative differences are floored at 0; jaccard is clamped to [0,1].
SetAlgebraEstimate estimate_set_algebra(const GumbelMaxSketch& a, const GumbelMaxSketch& b);

// |a \ (others[0] u others[1] u ...)|_w = c(a u others) - c(others), floored at 0.
double estimate_difference(const GumbelMaxSketch& a, std::span<const GumbelMaxSketch> others);

}  // namespace fastgm
