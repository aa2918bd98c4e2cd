#include "fastgm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "fastgm/error.hpp"
#include "fastgm/estimate.hpp"
#include "fastgm/stream.hpp"
#include "json.hpp"

namespace fastgm {

namespace {

constexpr std::uint64_t kTrialTag = 0x747269616cULL;     // "trial"
constexpr std::uint64_t kWorkloadTag = 0x776f726bULL;    // "work"

std::string join_k(const std::vector<std::uint32_t>& ks) {
  std::string out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ks[i]);
  }
  return out;
}

std::int64_t median(std::vector<std::int64_t> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "naive") return Method::kNaive;
  if (name == "fastgm") return Method::kFastGM;
  if (name == "stream") return Method::kStream;
  throw Error(ErrorCode::kInvalidConfig, "unknown method '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kNaive: return "naive";
    case Method::kFastGM: return "fastgm";
    case Method::kStream: return "stream";
  }
  return "unknown";
}

RmseTask parse_task(const std::string& name) {
  if (name == "jaccard") return RmseTask::kJaccard;
  if (name == "cardinality") return RmseTask::kCardinality;
  throw Error(ErrorCode::kInvalidConfig, "unknown task '" + name + "'");
}

std::string to_string(RmseTask task) {
  return task == RmseTask::kJaccard ? "jaccard" : "cardinality";
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return hash3(master, trial, kTrialTag);
}

GumbelMaxSketch sketch_with(Method method, const WeightedVector& v, const GenerationParams& params,
                            std::uint64_t* emitted) {
  switch (method) {
    case Method::kNaive: {
      GenerationStats stats;
      auto sk = sketch_naive(v, params, &stats);
      if (emitted) *emitted = stats.emitted;
      return sk;
    }
    case Method::kFastGM: {
      GenerationStats stats;
      auto sk = sketch_fastgm(v, params, &stats);
      if (emitted) *emitted = stats.emitted;
      return sk;
    }
    case Method::kStream: {
      if (v.empty()) throw Error(ErrorCode::kEmptyVector, "cannot sketch an empty vector");
      StreamSketchState state(params.k, params.scheme, /*skip_duplicates=*/false);
      for (const auto& [id, w] : v.entries()) state.update({id, w});
      if (emitted) *emitted = state.total_emitted();
      return state.finalize();
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown method");
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  workers.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

ExperimentReport run_speed_experiment(const SpeedConfig& config) {
  if (config.vectors.empty()) throw Error(ErrorCode::kInvalidConfig, "speed workload is empty");
  if (config.k_list.empty()) throw Error(ErrorCode::kInvalidConfig, "k list is empty");
  if (config.methods.empty()) throw Error(ErrorCode::kInvalidConfig, "no methods selected");
  if (config.repetitions < 1) throw Error(ErrorCode::kInvalidConfig, "repetitions must be >= 1");

  ExperimentReport report;
  report.experiment = "speed";
  std::size_t n_plus_total = 0;
  for (const auto& v : config.vectors) n_plus_total += v.n_plus();
  std::string methods;
  for (Method m : config.methods) methods += (methods.empty() ? "" : ";") + to_string(m);
  report.config = {{"workload", config.workload_name},
                   {"vectors", std::to_string(config.vectors.size())},
                   {"n_plus_total", std::to_string(n_plus_total)},
                   {"k_list", join_k(config.k_list)},
                   {"methods", methods},
                   {"delta", std::to_string(config.delta)},
                   {"repetitions", std::to_string(config.repetitions)},
                   {"seed", std::to_string(config.master_seed)}};

  using Clock = std::chrono::steady_clock;
  for (std::uint32_t k : config.k_list) {
    GenerationParams params{k, config.delta, SeedScheme{trial_seed(config.master_seed, 0)}};
    std::vector<GumbelMaxSketch> reference;
    std::int64_t naive_median = 0;
    const std::size_t first_row = report.speed.size();
    for (Method method : config.methods) {
      SpeedRow row{method, k, n_plus_total, {}, 0, 0, 0.0, true};
      // Warm-up run doubles as the agreement check and the work count.
      std::vector<GumbelMaxSketch> produced;
      produced.reserve(config.vectors.size());
      for (const auto& v : config.vectors) {
        std::uint64_t emitted = 0;
        produced.push_back(sketch_with(method, v, params, &emitted));
        row.emitted += emitted;
      }
      if (reference.empty()) {
        reference = std::move(produced);
      } else {
        row.matches_first_method = produced == reference;
      }
      for (int rep = 0; rep < config.repetitions; ++rep) {
        const auto start = Clock::now();
        for (const auto& v : config.vectors) {
          auto sk = sketch_with(method, v, params);
          asm volatile("" : : "r"(sk.y().data()) : "memory");
        }
        const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
        row.durations_ns.push_back(std::max<std::int64_t>(1, elapsed.count()));
      }
      row.median_ns = median(row.durations_ns);
      if (method == Method::kNaive) naive_median = row.median_ns;
      report.speed.push_back(std::move(row));
    }
    if (naive_median > 0) {
      for (std::size_t i = first_row; i < report.speed.size(); ++i) {
        report.speed[i].naive_over_method =
            static_cast<double>(naive_median) / static_cast<double>(report.speed[i].median_ns);
      }
    }
  }
  return report;
}

ExperimentReport run_rmse_experiment(const RmseConfig& config) {
  if (config.trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
  if (config.k_list.empty()) throw Error(ErrorCode::kInvalidConfig, "k list is empty");

  ExperimentReport report;
  report.experiment = "rmse";
  report.config = {{"task", to_string(config.task)},
                   {"n", std::to_string(config.n)},
                   {"dist", to_string(config.dist)},
                   {"k_list", join_k(config.k_list)},
                   {"trials", std::to_string(config.trials)},
                   {"delta", std::to_string(config.delta)},
                   {"seed", std::to_string(config.master_seed)}};
  if (config.task == RmseTask::kJaccard) {
    std::ostringstream target;
    target << config.target_jaccard;
    report.config.emplace_back("target_jaccard", target.str());
  }

  const std::uint64_t workload_seed = hash3(config.master_seed, kWorkloadTag, 0);
  WeightedVector a, b;
  double truth = 0.0;
  if (config.task == RmseTask::kJaccard) {
    std::tie(a, b) = make_pair_with_jaccard(config.n, config.target_jaccard, config.dist,
                                            workload_seed, 2.5);
    truth = exact_jaccard_p(a, b);
  } else {
    a = gen_synthetic(config.n, config.dist, workload_seed);
    truth = a.weight_sum();
  }

  for (std::uint32_t k : config.k_list) {
    if (config.task == RmseTask::kCardinality && k < 2) {
      throw Error(ErrorCode::kKTooSmall, "cardinality task needs k >= 2");
    }
    std::vector<double> estimates(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
      const GenerationParams params{k, config.delta, SeedScheme{trial_seed(config.master_seed, t)}};
      const auto sa = sketch_fastgm(a, params);
      if (config.task == RmseTask::kJaccard) {
        estimates[t] = estimate_jaccard_p(sa, sketch_fastgm(b, params)).value;
      } else {
        estimates[t] = estimate_cardinality(sa).value;
      }
    });
    double mean = 0.0, sq_err = 0.0;
    for (double e : estimates) {
      mean += e;
      sq_err += (e - truth) * (e - truth);
    }
    mean /= config.trials;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var = config.trials > 1 ? var / (config.trials - 1) : 0.0;
    const double theory = config.task == RmseTask::kJaccard
                              ? std::sqrt(truth * (1.0 - truth) / k)
                              : truth * std::sqrt(2.0 / k);
    report.rmse.push_back(RmseRow{config.task, k, config.n, config.trials, truth, mean, var,
                                  std::sqrt(sq_err / config.trials), theory});
  }
  return report;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  const auto flags = out.flags();
  out << std::setprecision(17);
  if (!report.speed.empty()) {
    out << "method,k,n_plus,rep,duration_ns,median_ns,emitted,naive_over_method,matches\n";
    for (const auto& row : report.speed) {
      for (std::size_t rep = 0; rep < row.durations_ns.size(); ++rep) {
        out << to_string(row.method) << ',' << row.k << ',' << row.n_plus_total << ',' << rep << ','
            << row.durations_ns[rep] << ',' << row.median_ns << ',' << row.emitted << ','
            << row.naive_over_method << ',' << (row.matches_first_method ? 1 : 0) << '\n';
      }
    }
  }
  if (!report.rmse.empty()) {
    out << "task,k,n,trials,truth,mean_estimate,variance,rmse,theoretical_rmse\n";
    for (const auto& row : report.rmse) {
      out << to_string(row.task) << ',' << row.k << ',' << row.n << ',' << row.trials << ','
          << row.truth << ',' << row.mean_estimate << ',' << row.variance << ',' << row.rmse << ','
          << row.theoretical_rmse << '\n';
    }
  }
  out.flags(flags);
}

void write_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::ordered_json doc;
  doc["experiment"] = report.experiment;
  auto& cfg = doc["config"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.config) cfg[key] = value;
  if (!report.speed.empty()) {
    auto& rows = doc["speed"] = nlohmann::ordered_json::array();
    for (const auto& row : report.speed) {
      rows.push_back({{"method", to_string(row.method)},
                      {"k", row.k},
                      {"n_plus", row.n_plus_total},
                      {"durations_ns", row.durations_ns},
                      {"median_ns", row.median_ns},
                      {"emitted", row.emitted},
                      {"naive_over_method", row.naive_over_method},
                      {"matches", row.matches_first_method}});
    }
  }
  if (!report.rmse.empty()) {
    auto& rows = doc["rmse"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rmse) {
      rows.push_back({{"task", to_string(row.task)},
                      {"k", row.k},
                      {"n", row.n},
                      {"trials", row.trials},
                      {"truth", row.truth},
                      {"mean_estimate", row.mean_estimate},
                      {"variance", row.variance},
                      {"rmse", row.rmse},
                      {"theoretical_rmse", row.theoretical_rmse}});
    }
  }
  out << doc.dump(2) << '\n';
}

}  // namespace fastgm
