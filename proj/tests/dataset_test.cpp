#include "fastgm/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fastgm/error.hpp"
#include "fastgm/estimate.hpp"

using namespace fastgm;

namespace {

const std::string kFixture = std::string(FASTGM_TEST_DATA_DIR) + "/tiny.sparse";

SparseDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sparse(in, "inline");
}

ErrorCode parse_error(const std::string& text, std::string* message = nullptr) {
  try {
    parse(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::kIo;
}

double mean(const WeightedVector& v) { return v.weight_sum() / v.n_plus(); }

}  // namespace

TEST(ParseSparse, LabelAndPairs) {
  const auto ds = parse("1 3:0.5 7:1.25\n");
  ASSERT_EQ(ds.vectors.size(), 1u);
  EXPECT_EQ(ds.vectors[0], WeightedVector({{3, 0.5}, {7, 1.25}}));
  EXPECT_EQ(ds.feature_dim, 7u);
}

TEST(ParseSparse, LabelIsOptional) {
  const auto ds = parse("3:0.5 7:1.25\n\n# comment\n+1 2:1\n");
  ASSERT_EQ(ds.vectors.size(), 2u);
  EXPECT_EQ(ds.vectors[0].n_plus(), 2u);
  EXPECT_EQ(ds.vectors[1], WeightedVector({{2, 1.0}}));
}

TEST(ParseSparse, EmptyInput) {
  const auto ds = parse("");
  EXPECT_TRUE(ds.vectors.empty());
  EXPECT_EQ(ds.feature_dim, 0u);
}

TEST(ParseSparse, ErrorsCarryLineNumbers) {
  std::string message;
  EXPECT_EQ(parse_error("1 2:1\n1 3:0\n", &message), ErrorCode::kInvalidWeight);
  EXPECT_NE(message.find("line 2"), std::string::npos);
  EXPECT_EQ(parse_error("1 2:-1\n"), ErrorCode::kInvalidWeight);
  EXPECT_EQ(parse_error("1 0:1\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_error("1 2:x\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_error("1 2:1 junk\n", &message), ErrorCode::kParse);
  EXPECT_NE(message.find("line 1"), std::string::npos);
  EXPECT_EQ(parse_error("1 2:1 2:3\n"), ErrorCode::kParse);
}

TEST(LoadSparse, FixtureGolden) {
  const auto ds = load_sparse(kFixture);
  EXPECT_EQ(ds.name, "tiny");
  ASSERT_EQ(ds.vectors.size(), 3u);
  EXPECT_EQ(ds.feature_dim, 12u);
  EXPECT_EQ(ds.vectors[1], WeightedVector({{1, 2.0}, {3, 0.5}, {4, 0.75}, {9, 0.1}}));

  const GenerationParams params{8, 0, SeedScheme{7}};
  std::vector<GumbelMaxSketch> sketches;
  for (const auto& v : ds.vectors) sketches.push_back(sketch_fastgm(v, params));

  // Frozen from a reference run; any change to hashing or generation shows up here.
  const std::vector<std::vector<ElementId>> expected_s = {
      {3, 7, 7, 7, 7, 3, 7, 7}, {4, 1, 1, 4, 4, 1, 1, 1}, {12, 12, 12, 12, 12, 2, 7, 7}};
  const std::vector<double> expected_c = {0x1.2dee008d224ap+0, 0x1.6682be00d1104p+2,
                                          0x1.b1c795df88a47p+2};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(std::vector<ElementId>(sketches[i].s().begin(), sketches[i].s().end()),
              expected_s[i]);
    EXPECT_EQ(estimate_cardinality(sketches[i]).value, expected_c[i]);
  }
  EXPECT_EQ(estimate_jaccard_p(sketches[0], sketches[2]).value, 0.25);
}

TEST(LoadSparse, MissingFile) {
  try {
    load_sparse("/no/such/file.sparse");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Distributions, ParseNames) {
  EXPECT_EQ(parse_distribution("uniform01"), Distribution::kUniform01);
  EXPECT_EQ(parse_distribution("exp"), Distribution::kExp1);
  EXPECT_EQ(parse_distribution("normal(1,0.1)"), Distribution::kNormal);
  EXPECT_EQ(parse_distribution("beta(5,5)"), Distribution::kBeta55);
  EXPECT_EQ(parse_distribution(to_string(Distribution::kBeta55)), Distribution::kBeta55);
  EXPECT_THROW(parse_distribution("cauchy"), Error);
}

TEST(GenSynthetic, SupportAndMeans) {
  const auto uni = gen_synthetic(100, Distribution::kUniform01, 1);
  ASSERT_EQ(uni.n_plus(), 100u);
  for (const auto& [id, w] : uni.entries()) {
    EXPECT_GT(w, 0.0);
    EXPECT_LT(w, 1.0);
  }
  EXPECT_NEAR(mean(gen_synthetic(10'000, Distribution::kNormal, 2)), 1.0, 0.01);
  EXPECT_NEAR(mean(gen_synthetic(10'000, Distribution::kBeta55, 3)), 0.5, 0.01);
  EXPECT_NEAR(mean(gen_synthetic(10'000, Distribution::kExp1, 4)), 1.0, 0.05);
  EXPECT_EQ(gen_synthetic(50, Distribution::kExp1, 9), gen_synthetic(50, Distribution::kExp1, 9));
  EXPECT_THROW(gen_synthetic(0, Distribution::kExp1, 9), Error);
}

TEST(MakePair, HitsTargetSimilarity) {
  for (double target : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const auto [u, v] = make_pair_with_jaccard(200, target, Distribution::kUniform01, 5, 2.5);
    EXPECT_NEAR(exact_jaccard_p(u, v), target, 1e-12) << target;
  }
  EXPECT_THROW(make_pair_with_jaccard(2, 0.5, Distribution::kUniform01, 5), Error);
  EXPECT_THROW(make_pair_with_jaccard(10, 1.5, Distribution::kUniform01, 5), Error);
}
