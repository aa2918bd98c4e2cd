#include "fastgm/estimate.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fastgm/error.hpp"

namespace fastgm {

namespace {

void check_compatible(const GumbelMaxSketch& a, const GumbelMaxSketch& b) {
  if (a.k() != b.k()) {
    throw Error(ErrorCode::kMismatchedK,
                "k=" + std::to_string(a.k()) + " vs k=" + std::to_string(b.k()));
  }
  if (a.fingerprint() != b.fingerprint()) {
    throw Error(ErrorCode::kMismatchedScheme, "sketches were built with different seed schemes");
  }
}

// Pairs (u_l, v_l) over the union of supports, absent entries as 0.
std::vector<std::pair<double, double>> align(const WeightedVector& u, const WeightedVector& v) {
  std::vector<std::pair<double, double>> out;
  out.reserve(u.n_plus() + v.n_plus());
  auto a = u.entries();
  auto b = v.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.emplace_back(a[i++].second, 0.0);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(0.0, b[j++].second);
    } else {
      out.emplace_back(a[i++].second, b[j++].second);
    }
  }
  return out;
}

}  // namespace

SimilarityEstimate estimate_jaccard_p(const GumbelMaxSketch& a, const GumbelMaxSketch& b) {
  check_compatible(a, b);
  std::uint32_t matches = 0;
  for (std::uint32_t j = 0; j < a.k(); ++j) matches += a.s()[j] == b.s()[j] ? 1 : 0;
  return {static_cast<double>(matches) / a.k(), a.k()};
}

double exact_jaccard_p(const WeightedVector& u, const WeightedVector& v) {
  const auto pairs = align(u, v);
  double total = 0.0;
  for (const auto& [ui, vi] : pairs) {
    if (ui == 0.0 || vi == 0.0) continue;
    double denom = 0.0;
    for (const auto& [ul, vl] : pairs) denom += std::max(ul / ui, vl / vi);
    total += 1.0 / denom;
  }
  return total;
}

double exact_jaccard_w(const WeightedVector& u, const WeightedVector& v) {
  double lo = 0.0, hi = 0.0;
  for (const auto& [ul, vl] : align(u, v)) {
    lo += std::min(ul, vl);
    hi += std::max(ul, vl);
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

CardinalityEstimate estimate_cardinality(const GumbelMaxSketch& sketch) {
  if (sketch.k() < 2) throw Error(ErrorCode::kKTooSmall, "cardinality needs k >= 2");
  const double sum = std::accumulate(sketch.y().begin(), sketch.y().end(), 0.0);
  return {static_cast<double>(sketch.k() - 1) / sum, sketch.k()};
}

GumbelMaxSketch merge(std::span<const GumbelMaxSketch> sketches) {
  if (sketches.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to merge");
  const GumbelMaxSketch& first = sketches.front();
  std::vector<ElementId> s(first.s().begin(), first.s().end());
  std::vector<double> y(first.y().begin(), first.y().end());
  for (const auto& other : sketches.subspan(1)) {
    check_compatible(first, other);
    for (std::uint32_t j = 0; j < first.k(); ++j) {
      const double oy = other.y()[j];
      const ElementId os = other.s()[j];
      // Same (time, id) order as RegisterFile::offer, so merge is commutative.
      if (oy < y[j] || (oy == y[j] && os < s[j])) {
        y[j] = oy;
        s[j] = os;
      }
    }
  }
  return GumbelMaxSketch(first.fingerprint(), std::move(s), std::move(y));
}

GumbelMaxSketch merge(const GumbelMaxSketch& a, const GumbelMaxSketch& b) {
  const GumbelMaxSketch pair[] = {a, b};
  return merge(std::span<const GumbelMaxSketch>(pair));
}

SetAlgebraEstimate estimate_set_algebra(const GumbelMaxSketch& a, const GumbelMaxSketch& b) {
  check_compatible(a, b);
  const double ca = estimate_cardinality(a).value;
  const double cb = estimate_cardinality(b).value;
  const double cu = estimate_cardinality(merge(a, b)).value;
  const double inter = std::max(0.0, ca + cb - cu);
  return SetAlgebraEstimate{
      .union_w = cu,
      .intersection_w = inter,
      .a_minus_b_w = std::max(0.0, cu - cb),
      .jaccard_w = std::clamp(inter / cu, 0.0, 1.0),
  };
}

double estimate_difference(const GumbelMaxSketch& a, std::span<const GumbelMaxSketch> others) {
  if (others.empty()) return estimate_cardinality(a).value;
  const GumbelMaxSketch rest = merge(others);
  const double c_rest = estimate_cardinality(rest).value;
  const double c_all = estimate_cardinality(merge(a, rest)).value;
  return std::max(0.0, c_all - c_rest);
}

}  // namespace fastgm
