#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fastgm/dataset.hpp"
#include "fastgm/sketch.hpp"

namespace fastgm {

enum class Method { kNaive, kFastGM, kStream };

Method parse_method(const std::string& name);
std::string to_string(Method method);

// Scheme seed for trial t under a master seed. Distinct trials never share a scheme.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

// Sketches one vector with the chosen generator; `emitted` receives the
// number of order statistics generated.
GumbelMaxSketch sketch_with(Method method, const WeightedVector& v, const GenerationParams& params,
                            std::uint64_t* emitted = nullptr);

// Runs fn(i) for i in [0, count) on `threads` workers (0 or 1 = inline).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

struct SpeedConfig {
  std::string workload_name;
  std::vector<WeightedVector> vectors;
  std::vector<std::uint32_t> k_list;
  std::vector<Method> methods{Method::kNaive, Method::kFastGM, Method::kStream};
  std::uint32_t delta = 0;
  int repetitions = 5;  // timed runs after one warm-up
  std::uint64_t master_seed = 1;
};

struct SpeedRow {
  Method method;
  std::uint32_t k;
  std::size_t n_plus_total;
  std::vector<std::int64_t> durations_ns;
  std::int64_t median_ns;
  std::uint64_t emitted;
  double naive_over_method;  // 0 when naive was not run
  bool matches_first_method;
};

enum class RmseTask { kJaccard, kCardinality };

RmseTask parse_task(const std::string& name);
std::string to_string(RmseTask task);

struct RmseConfig {
  RmseTask task = RmseTask::kCardinality;
  std::size_t n = 1000;
  Distribution dist = Distribution::kUniform01;
  double target_jaccard = 0.5;  // jaccard task only
  std::vector<std::uint32_t> k_list{200};
  std::uint32_t trials = 1000;
  std::uint32_t delta = 0;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
};

struct RmseRow {
  RmseTask task;
  std::uint32_t k;
  std::size_t n;
  std::uint32_t trials;
  double truth;
  double mean_estimate;
  double variance;
  double rmse;
  double theoretical_rmse;  // sqrt(J(1-J)/k) or c*sqrt(2/k)
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<SpeedRow> speed;
  std::vector<RmseRow> rmse;
};

ExperimentReport run_speed_experiment(const SpeedConfig& config);
ExperimentReport run_rmse_experiment(const RmseConfig& config);

void write_csv(std::ostream& out, const ExperimentReport& report);
void write_json(std::ostream& out, const ExperimentReport& report);

}  // namespace fastgm
