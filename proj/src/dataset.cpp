#include "fastgm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fastgm/error.hpp"

namespace fastgm {

namespace {

std::string line_prefix(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

SparseDataset parse_sparse(std::istream& in, std::string name) {
  SparseDataset out;
  out.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream tokens(line);
    std::string token;
    std::vector<WeightedVector::Entry> entries;
    bool first_token = true;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        if (!first_token) {
          throw Error(ErrorCode::kParse, line_prefix(line_no) + "expected index:value, got '" +
                                             token + "'");
        }
        first_token = false;  // label
        continue;
      }
      first_token = false;
      const std::string index_str = token.substr(0, colon);
      const std::string value_str = token.substr(colon + 1);
      std::size_t used = 0;
      long long index = 0;
      double value = 0.0;
      try {
        index = std::stoll(index_str, &used);
        if (used != index_str.size()) throw std::invalid_argument("index");
        value = std::stod(value_str, &used);
        if (used != value_str.size()) throw std::invalid_argument("value");
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kParse, line_prefix(line_no) + "malformed pair '" + token + "'");
      }
      if (index < 1) {
        throw Error(ErrorCode::kParse, line_prefix(line_no) + "indices are 1-based, got " +
                                           std::to_string(index));
      }
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::kInvalidWeight,
                    line_prefix(line_no) + "non-positive value in '" + token + "'");
      }
      entries.emplace_back(static_cast<ElementId>(index), value);
    }
    try {
      out.vectors.emplace_back(std::move(entries));
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::kInvalidWeight ? ErrorCode::kInvalidWeight
                                                        : ErrorCode::kParse,
                  line_prefix(line_no) + e.what());
    }
    out.feature_dim = std::max<std::size_t>(out.feature_dim, out.vectors.back().max_id());
  }
  return out;
}

SparseDataset load_sparse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return parse_sparse(in, std::filesystem::path(path).stem().string());
}

Distribution parse_distribution(const std::string& name) {
  if (name == "uniform01" || name == "uni" || name == "uniform") return Distribution::kUniform01;
  if (name == "exp1" || name == "exp") return Distribution::kExp1;
  if (name == "normal" || name == "normal(1,0.1)") return Distribution::kNormal;
  if (name == "beta55" || name == "beta" || name == "beta(5,5)") return Distribution::kBeta55;
  throw Error(ErrorCode::kInvalidConfig, "unknown distribution '" + name + "'");
}

std::string to_string(Distribution dist) {
  switch (dist) {
    case Distribution::kUniform01: return "uniform01";
    case Distribution::kExp1: return "exp1";
    case Distribution::kNormal: return "normal(1,0.1)";
    case Distribution::kBeta55: return "beta(5,5)";
  }
  return "unknown";
}

std::vector<double> draw_weights(std::size_t n, Distribution dist, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::exponential_distribution<double> exponential(1.0);
  std::normal_distribution<double> normal(1.0, 0.1);
  std::gamma_distribution<double> gamma(5.0, 1.0);
  while (out.size() < n) {
    double w = 0.0;
    switch (dist) {
      case Distribution::kUniform01: w = uniform(rng); break;
      case Distribution::kExp1: w = exponential(rng); break;
      case Distribution::kNormal: w = normal(rng); break;
      case Distribution::kBeta55: {
        const double x = gamma(rng);
        const double y = gamma(rng);
        w = x / (x + y);
        break;
      }
    }
    if (w >= kMinWeight && std::isfinite(w)) out.push_back(w);
  }
  return out;
}

WeightedVector gen_synthetic(std::size_t n, Distribution dist, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidConfig, "synthetic vectors need n >= 1");
  return WeightedVector::from_dense(draw_weights(n, dist, seed));
}

std::pair<WeightedVector, WeightedVector> make_pair_with_jaccard(std::size_t n, double target,
                                                                 Distribution dist,
                                                                 std::uint64_t seed,
                                                                 double second_scale) {
  if (!(target >= 0.0 && target <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "target similarity must lie in [0,1]");
  }
  if (n < 3 && target > 0.0 && target < 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "need n >= 3 for a fractional similarity");
  }
  if (n < 2 && target == 0.0) throw Error(ErrorCode::kInvalidConfig, "need n >= 2");
  if (n == 0) throw Error(ErrorCode::kInvalidConfig, "need n >= 1");

  const std::vector<double> w = draw_weights(n, dist, seed);
  std::size_t shared = 0;
  if (target >= 1.0) {
    shared = n;
  } else if (target > 0.0) {
    shared = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(n * target)), 1, n - 2);
  }
  const std::size_t only_a = (n - shared + 1) / 2;

  double shared_mass = 0.0, exclusive_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) (i < shared ? shared_mass : exclusive_mass) += w[i];
  const double factor = (target > 0.0 && target < 1.0)
                            ? shared_mass * (1.0 - target) / target / exclusive_mass
                            : 1.0;

  std::vector<WeightedVector::Entry> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<ElementId>(i + 1);
    if (i < shared) {
      a.emplace_back(id, w[i]);
      b.emplace_back(id, w[i] * second_scale);
    } else if (i < shared + only_a) {
      a.emplace_back(id, w[i] * factor);
    } else {
      b.emplace_back(id, w[i] * factor * second_scale);
    }
  }
  return {WeightedVector(std::move(a)), WeightedVector(std::move(b))};
}

}  // namespace fastgm
