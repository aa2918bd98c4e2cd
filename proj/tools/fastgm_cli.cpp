// Command-line front end: sketching, estimation, merging and the experiment
// harness. Run `fastgm --help` for the subcommand list.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "fastgm/dataset.hpp"
#include "fastgm/error.hpp"
#include "fastgm/estimate.hpp"
#include "fastgm/experiments.hpp"
#include "fastgm/netsim.hpp"
#include "fastgm/sketch.hpp"
#include "fastgm/stream.hpp"
#include "json.hpp"

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::uint32_t k = 128;
  std::uint32_t delta = 0;
  unsigned threads = 1;
  std::string format = "csv";
};

void emit_record(const GlobalOptions& opts,
                 const std::vector<std::pair<std::string, double>>& fields) {
  if (opts.format == "json") {
    nlohmann::ordered_json doc;
    for (const auto& [key, value] : fields) {
      if (key == "k") {
        doc[key] = static_cast<std::uint64_t>(value);
      } else {
        doc[key] = value;
      }
    }
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::cout << std::setprecision(17);
  for (std::size_t i = 0; i < fields.size(); ++i) std::cout << (i ? "," : "") << fields[i].first;
  std::cout << '\n';
  for (std::size_t i = 0; i < fields.size(); ++i) std::cout << (i ? "," : "") << fields[i].second;
  std::cout << '\n';
}

void emit_report(const GlobalOptions& opts, const fastgm::ExperimentReport& report) {
  if (opts.format == "json") {
    fastgm::write_json(std::cout, report);
  } else {
    fastgm::write_csv(std::cout, report);
  }
}

std::vector<fastgm::WeightedVector> synthetic_workload(std::size_t n, fastgm::Distribution dist,
                                                       std::size_t count, std::uint64_t seed) {
  std::vector<fastgm::WeightedVector> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(fastgm::gen_synthetic(n, dist, fastgm::hash3(seed, i, 0x766563)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fastgm;
  CLI::App app{"Gumbel-Max sketch toolkit (FastGM, Stream-FastGM, estimators, experiments)"};
  app.require_subcommand(1);
  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "Master seed")->envname("FASTGM_SEED");
  app.add_option("--k", opts.k, "Sketch length")->check(CLI::Range(1u, 1u << 28));
  app.add_option("--delta", opts.delta, "FastSearch budget increment (0 = k)");
  app.add_option("--threads", opts.threads, "Worker threads for trials");
  app.add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  // sketch
  auto* sk_cmd = app.add_subcommand("sketch", "Sketch one vector from a file");
  sk_cmd->fallthrough();
  std::string sk_input, sk_output, sk_input_format = "sparse", sk_method = "fastgm";
  std::size_t sk_row = 0;
  bool sk_text = false;
  sk_cmd->add_option("input", sk_input, "Input file")->required()->check(CLI::ExistingFile);
  sk_cmd->add_option("-o,--output", sk_output, "Sketch file to write")->required();
  sk_cmd->add_option("--input-format", sk_input_format, "sparse (index:value lines) or stream")
      ->check(CLI::IsMember({"sparse", "stream"}));
  sk_cmd->add_option("--row", sk_row, "Vector (line) of a sparse file to sketch, 0-based");
  sk_cmd->add_option("--method", sk_method, "naive, fastgm or stream")
      ->check(CLI::IsMember({"naive", "fastgm", "stream"}));
  sk_cmd->add_flag("--text", sk_text, "Write the text sketch format instead of binary");

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "Cardinality of one sketch, or similarity of two");
  est_cmd->fallthrough();
  std::vector<std::string> est_inputs;
  est_cmd->add_option("sketches", est_inputs, "One or two sketch files")
      ->required()
      ->expected(1, 2)
      ->check(CLI::ExistingFile);

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Merge sketches of several sets into their union");
  merge_cmd->fallthrough();
  std::vector<std::string> merge_inputs;
  std::string merge_output;
  bool merge_text = false;
  merge_cmd->add_option("sketches", merge_inputs, "Sketch files")->required()->check(CLI::ExistingFile);
  merge_cmd->add_option("-o,--output", merge_output, "Merged sketch file")->required();
  merge_cmd->add_flag("--text", merge_text, "Write the text sketch format instead of binary");

  // bench-speed
  auto* speed_cmd = app.add_subcommand("bench-speed", "Time naive, FastGM and streaming generators");
  speed_cmd->fallthrough();
  std::size_t sp_n = 1000, sp_vectors = 1;
  std::string sp_dist = "uniform01", sp_dataset;
  std::vector<std::uint32_t> sp_k_list{256, 1024};
  std::vector<std::string> sp_methods{"naive", "fastgm", "stream"};
  int sp_reps = 5;
  speed_cmd->add_option("--n", sp_n, "Synthetic vector length");
  speed_cmd->add_option("--vectors", sp_vectors, "Synthetic vectors per workload");
  speed_cmd->add_option("--dist", sp_dist, "uniform01, exp1, normal, beta55");
  speed_cmd->add_option("--dataset", sp_dataset, "Sparse dataset file instead of synthetic data")
      ->check(CLI::ExistingFile);
  speed_cmd->add_option("--k-list", sp_k_list, "Sketch lengths")->delimiter(',');
  speed_cmd->add_option("--methods", sp_methods, "Methods to time")->delimiter(',');
  speed_cmd->add_option("--reps", sp_reps, "Timed repetitions after one warm-up")->check(CLI::Range(1, 1000000));

  // bench-rmse
  auto* rmse_cmd = app.add_subcommand("bench-rmse", "Empirical RMSE of the estimators");
  rmse_cmd->fallthrough();
  RmseConfig rmse_cfg;
  std::string rm_task = "cardinality", rm_dist = "uniform01";
  rmse_cmd->add_option("--task", rm_task, "jaccard or cardinality");
  rmse_cmd->add_option("--n", rmse_cfg.n, "Vector length");
  rmse_cmd->add_option("--dist", rm_dist, "Weight distribution");
  rmse_cmd->add_option("--jaccard", rmse_cfg.target_jaccard, "Target similarity (jaccard task)");
  rmse_cmd->add_option("--k-list", rmse_cfg.k_list, "Sketch lengths")->delimiter(',');
  rmse_cmd->add_option("--trials", rmse_cfg.trials, "Independent schemes per k");

  // simulate-net
  auto* net_cmd = app.add_subcommand("simulate-net", "Braided-chain sensor network simulation");
  net_cmd->fallthrough();
  BraidNetConfig net_cfg;
  std::string net_dist = "beta55";
  std::uint32_t net_runs = 1;
  bool net_k_set = false;
  net_cmd->add_option("--d", net_cfg.d, "Layers");
  net_cmd->add_option("--p1", net_cfg.p1, "Same-chain link success probability");
  net_cmd->add_option("--p2", net_cfg.p2, "Cross-chain link success probability");
  net_cmd->add_option("--n", net_cfg.n, "Packets per source");
  net_cmd->add_option("--dist", net_dist, "Packet size distribution");
  net_cmd->add_option("--runs", net_runs, "Independent runs");

  CLI11_PARSE(app, argc, argv);
  net_k_set = app.count("--k") > 0;

  try {
    if (*sk_cmd) {
      const SeedScheme scheme{opts.seed};
      const GenerationParams params{opts.k, opts.delta, scheme};
      GumbelMaxSketch sketch;
      if (sk_input_format == "stream") {
        std::ifstream in(sk_input);
        const auto items = parse_stream(in);
        sketch = sketch_stream(items, opts.k, scheme);
      } else {
        const SparseDataset data = load_sparse(sk_input);
        if (sk_row >= data.vectors.size()) {
          throw Error(ErrorCode::kInvalidConfig, "row " + std::to_string(sk_row) + " out of range (" +
                                                     std::to_string(data.vectors.size()) + " vectors)");
        }
        sketch = sketch_with(parse_method(sk_method), data.vectors[sk_row], params);
      }
      save_sketch(sk_output, sketch, sk_text ? SketchFormat::kText : SketchFormat::kBinary);
    } else if (*est_cmd) {
      const GumbelMaxSketch a = load_sketch(est_inputs[0]);
      if (est_inputs.size() == 1) {
        emit_record(opts, {{"k", a.k()}, {"cardinality", estimate_cardinality(a).value}});
      } else {
        const GumbelMaxSketch b = load_sketch(est_inputs[1]);
        std::vector<std::pair<std::string, double>> fields{
            {"k", a.k()}, {"jaccard_p", estimate_jaccard_p(a, b).value}};
        if (a.k() >= 2) {
          const auto alg = estimate_set_algebra(a, b);
          fields.insert(fields.end(), {{"union_w", alg.union_w},
                                       {"intersection_w", alg.intersection_w},
                                       {"a_minus_b_w", alg.a_minus_b_w},
                                       {"jaccard_w", alg.jaccard_w}});
        }
        emit_record(opts, fields);
      }
    } else if (*merge_cmd) {
      std::vector<GumbelMaxSketch> inputs;
      for (const auto& path : merge_inputs) inputs.push_back(load_sketch(path));
      save_sketch(merge_output, merge(inputs), merge_text ? SketchFormat::kText : SketchFormat::kBinary);
    } else if (*speed_cmd) {
      SpeedConfig cfg;
      if (!sp_dataset.empty()) {
        SparseDataset data = load_sparse(sp_dataset);
        cfg.workload_name = data.name;
        for (auto& v : data.vectors) {
          if (!v.empty()) cfg.vectors.push_back(std::move(v));
        }
      } else {
        const Distribution dist = parse_distribution(sp_dist);
        cfg.workload_name = "synthetic:" + to_string(dist) + ":n=" + std::to_string(sp_n);
        cfg.vectors = synthetic_workload(sp_n, dist, sp_vectors, opts.seed);
      }
      cfg.k_list = sp_k_list;
      cfg.methods.clear();
      for (const auto& m : sp_methods) cfg.methods.push_back(parse_method(m));
      cfg.delta = opts.delta;
      cfg.repetitions = sp_reps;
      cfg.master_seed = opts.seed;
      emit_report(opts, run_speed_experiment(cfg));
    } else if (*rmse_cmd) {
      rmse_cfg.task = parse_task(rm_task);
      rmse_cfg.dist = parse_distribution(rm_dist);
      rmse_cfg.delta = opts.delta;
      rmse_cfg.master_seed = opts.seed;
      rmse_cfg.threads = opts.threads;
      emit_report(opts, run_rmse_experiment(rmse_cfg));
    } else if (*net_cmd) {
      net_cfg.weight_dist = parse_distribution(net_dist);
      if (net_k_set) net_cfg.k = opts.k;
      std::vector<std::vector<std::vector<QueryCell>>> results(net_runs);
      parallel_for(net_runs, opts.threads, [&](std::size_t run) {
        BraidNetConfig cfg = net_cfg;
        cfg.seed = trial_seed(opts.seed, run);
        const Simulation sim = simulate(cfg);
        for (std::uint32_t layer = 1; layer <= cfg.d; ++layer) {
          results[run].push_back(query_node(sim, layer));
        }
      });
      if (opts.format == "json") {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (std::size_t run = 0; run < results.size(); ++run) {
          for (std::size_t l = 0; l < results[run].size(); ++l) {
            for (const auto& c : results[run][l]) {
              doc.push_back({{"run", run},
                             {"layer", l + 1},
                             {"query", to_string(c.query)},
                             {"exact", c.exact},
                             {"estimate", c.defined ? nlohmann::ordered_json(c.estimate) : nullptr},
                             {"sigma", c.defined ? nlohmann::ordered_json(c.sigma) : nullptr}});
            }
          }
        }
        std::cout << doc.dump(2) << '\n';
      } else {
        std::cout << std::setprecision(17) << "run,layer,query,exact,estimate,sigma,defined\n";
        for (std::size_t run = 0; run < results.size(); ++run) {
          for (std::size_t l = 0; l < results[run].size(); ++l) {
            for (const auto& c : results[run][l]) {
              std::cout << run << ',' << l + 1 << ',' << to_string(c.query) << ',' << c.exact << ','
                        << c.estimate << ',' << c.sigma << ',' << (c.defined ? 1 : 0) << '\n';
            }
          }
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "fastgm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
