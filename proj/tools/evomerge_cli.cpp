// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

// evomerge: merge checkpoints, calibrate and sample evaluation subsets, run the
// multi-objective search and summarize results.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "evomerge/checkpoint.hpp"
#include "evomerge/errors.hpp"
#include "evomerge/io_util.hpp"
#include "evomerge/merge.hpp"
#include "evomerge/report.hpp"
#include "evomerge/run.hpp"
#include "evomerge/serialization.hpp"
#include "evomerge/subset.hpp"

namespace fs = std::filesystem;
using namespace evomerge;

namespace {

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> config;
  unsigned workers = 1;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    std::istringstream in(token);
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) {
      throw UsageError(fmt::format("--{}: '{}' is not a valid number", what, token));
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(fmt::format("--{} needs at least one value", what));
  return values;
}

fs::path require_out(const GlobalOptions& g, const char* command) {
  if (!g.out) throw UsageError(fmt::format("{}: --out is required", command));
  return *g.out;
}

EvaluatorSource evaluator_source(const std::optional<std::string>& benchmark,
                                 const std::optional<std::string>& records, std::uint64_t seed) {
  if (benchmark && records) throw UsageError("give --benchmark or --records, not both");
  EvaluatorSource source;
  if (records) {
    source.records = *records;
  } else if (benchmark) {
    source.benchmark = *benchmark;
    source.noise_seed = seed;
  } else {
    source.generator_seed = seed;
  }
  return source;
}

// ---------------------------------------------------------------------------

struct MergeArgs {
  std::string system2;
  std::string system1;
  std::string op;
  std::string params;
  bool no_validate = false;
  double linear_low = LinearBounds{}.low;
  double linear_high = LinearBounds{}.high;
};

int cmd_merge(const MergeArgs& a, const GlobalOptions& g) {
  const fs::path out = require_out(g, "merge");
  Genotype genotype;
  try {
    genotype.kind = parse_merge_kind(a.op);
    genotype.values = parse_list<double>(a.params, "params");
    validate_genotype(genotype, {a.linear_low, a.linear_high});
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const LoadOptions load{!a.no_validate};
  const Checkpoint system2 = load_checkpoint(a.system2, load);
  const Checkpoint system1 = load_checkpoint(a.system1, load);
  const MergeEndpoints endpoints(system2, system1);
  const Checkpoint merged = decode_genotype(genotype, endpoints, {a.linear_low, a.linear_high});
  save_checkpoint(merged, out);
  fmt::print("{} -> {}: {} tensors, {} parameters\n", candidate_id(genotype), out.string(),
             merged.tensors.size(), merged.parameter_count());
  return 0;
}

struct CalibrateArgs {
  std::optional<std::string> benchmark;
  std::optional<std::string> records;
  std::optional<std::string> write_benchmark;
  int k = 10;
};

int cmd_calibrate(const CalibrateArgs& a, const GlobalOptions& g) {
  const fs::path out = require_out(g, "calibrate");
  if (a.k < 2) throw UsageError(fmt::format("--k must be >= 2, got {}", a.k));
  const auto source = evaluator_source(a.benchmark, a.records, g.seed.value_or(0));
  const auto evaluator = make_evaluator(source);
  if (a.write_benchmark) {
    const auto* sim = dynamic_cast<const SimulatedEvaluator*>(evaluator.get());
    if (!sim) throw UsageError("--write-benchmark needs a simulated evaluator");
    write_file_atomic(*a.write_benchmark, benchmark_to_json(sim->benchmark()).dump(2) + "\n");
  }
  auto manifest = out;
  manifest.replace_extension(".candidates.jsonl");
  const auto matrix = run_calibration(*evaluator, a.k, g.workers, manifest);
  write_file_atomic(out, matrix_to_json(matrix).dump() + "\n");
  fmt::print("calibration matrix: {} models x {} items -> {}\n", matrix.models(), matrix.items(),
             out.string());
  return 0;
}

struct SampleArgs {
  std::string matrix;
  std::string strategy = "entropy";
  long long size = 50;
};

int cmd_sample_subset(const SampleArgs& a, const GlobalOptions& g) {
  const fs::path out = require_out(g, "sample-subset");
  if (a.size <= 0) throw UsageError(fmt::format("--size must be positive, got {}", a.size));
  SubsetStrategy strategy{};
  try {
    strategy = parse_subset_strategy(a.strategy);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const auto matrix = matrix_from_json(parse_json(read_text_file(a.matrix), a.matrix));
  const auto subset =
      select_subset(matrix, strategy, static_cast<std::size_t>(a.size), g.seed.value_or(0));
  write_file_atomic(out, subset_to_json(subset).dump(2) + "\n");

  const auto stats = item_stats(matrix);
  std::vector<double> h;
  for (const auto& id : subset.item_ids) h.push_back(stats[matrix.item_index(id)].entropy);
  std::sort(h.begin(), h.end());
  const double median = h.size() % 2 ? h[h.size() / 2]
                                     : 0.5 * (h[h.size() / 2 - 1] + h[h.size() / 2]);
  fmt::print("{} items ({}) -> {}\nentropy over selected items: min {:.6f}  median {:.6f}  max {:.6f}\n",
             subset.item_ids.size(), to_string(strategy), out.string(), h.front(), median, h.back());
  return 0;
}

int cmd_evolve(const GlobalOptions& g) {
  if (!g.config) throw UsageError("evolve: --config is required");
  RunConfig cfg;
  try {
    auto j = parse_json(read_text_file(*g.config), *g.config);
    cfg = RunConfig::from_json(j);
  } catch (const InvalidArgument& e) {
    throw UsageError(fmt::format("{}: {}", *g.config, e.what()));
  }
  if (g.seed) cfg.search.seed = *g.seed;
  if (g.out) cfg.output_dir = *g.out;
  const auto outcome = run_evolve(cfg, g.workers);
  fmt::print("{} evaluations on {} items; {} front members -> {}\n", outcome.search.history.size(),
             outcome.subset.item_ids.size(), outcome.front.size(), cfg.output_dir.string());
  fmt::print("{}", front_table(outcome.front));
  return 0;
}

struct FidelityArgs {
  std::optional<std::string> benchmark;
  std::string strategies = "entropy,random,disagreement";
  std::string sizes = "10,25,50,100,200";
  int seeds = 20;
  long long models = 50;
  int k = 10;
};

int cmd_fidelity(const FidelityArgs& a, const GlobalOptions& g) {
  const fs::path out = require_out(g, "fidelity");
  std::vector<SubsetStrategy> strategies;
  {
    std::stringstream ss(a.strategies);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        strategies.push_back(parse_subset_strategy(token));
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
    }
  }
  if (strategies.empty()) throw UsageError("--strategies needs at least one strategy");
  const auto sizes = parse_list<std::size_t>(a.sizes, "sizes");
  if (a.seeds < 1) throw UsageError("--seeds must be >= 1");
  if (a.models < 2) throw UsageError("--models must be >= 2");
  if (a.k < 2) throw UsageError("--k must be >= 2");

  const std::uint64_t base = g.seed.value_or(0);
  const auto evaluator = make_evaluator(evaluator_source(a.benchmark, std::nullopt, base));
  const auto& bench = dynamic_cast<const SimulatedEvaluator&>(*evaluator).benchmark();
  for (const auto s : sizes) {
    if (s == 0 || s > bench.size()) {
      throw UsageError(fmt::format("--sizes: {} outside [1, {}]", s, bench.size()));
    }
  }
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < a.seeds; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));

  const auto rows = rank_fidelity_curve(bench, strategies, sizes,
                                        static_cast<std::size_t>(a.models), seeds,
                                        {a.k, g.workers});
  const auto means = aggregate_fidelity(rows);
  fs::create_directories(out);
  write_file_atomic(out / "fidelity.csv", fidelity_csv(rows));
  write_file_atomic(out / "fidelity_mean.csv", fidelity_mean_csv(means));
  fmt::print("{:<14} {:>6} {:>10}\n", "strategy", "size", "mean rho");
  for (const auto& m : means) {
    fmt::print("{:<14} {:>6} {:>10.4f}\n", to_string(m.strategy), m.size, m.mean_rho);
  }
  return 0;
}

struct ReportArgs {
  std::string records;
  std::string candidate;
  std::string baseline;
};

int cmd_report(const ReportArgs& a, const GlobalOptions& g) {
  const auto records = load_record_evaluations(a.records);
  const auto find = [&](const std::string& id) -> const std::vector<ItemOutcome>& {
    const auto it = records.find(id);
    if (it == records.end()) throw Error(fmt::format("no records for candidate '{}'", id));
    return it->second;
  };
  const auto report = build_report(group_by_benchmark(find(a.candidate)),
                                   group_by_benchmark(find(a.baseline)));
  fmt::print("{} vs {}\n{}", a.candidate, a.baseline, report_text(report));
  if (g.out) {
    const fs::path dir = *g.out;
    fs::create_directories(dir);
    write_file_atomic(dir / "report.csv", report_csv(report));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective evolutionary model merging"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed (default 0)");
  app.add_option("--out", global.out, "Output file or directory");
  app.add_option("--config", global.config, "Run configuration (JSON)");
  app.add_option("--workers", global.workers, "Worker threads")->check(CLI::PositiveNumber);

  MergeArgs merge;
  auto* merge_cmd = app.add_subcommand("merge", "Merge two checkpoints");
  merge_cmd->add_option("--system2", merge.system2, "System-2 (slow) checkpoint")->required();
  merge_cmd->add_option("--system1", merge.system1, "System-1 (fast) checkpoint")->required();
  merge_cmd->add_option("--op", merge.op, "ta | ties | linear")->required();
  merge_cmd->add_option("--params", merge.params, "Comma-separated genotype values")->required();
  merge_cmd->add_flag("--no-validate", merge.no_validate, "Skip the NaN/Inf check on load");
  merge_cmd->add_option("--linear-low", merge.linear_low, "Lower bound of linear weights");
  merge_cmd->add_option("--linear-high", merge.linear_high, "Upper bound of linear weights");

  CalibrateArgs calibrate;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Build a calibration correctness matrix");
  calibrate_cmd->add_option("--benchmark", calibrate.benchmark, "Simulated benchmark JSON");
  calibrate_cmd->add_option("--records", calibrate.records, "Evaluation records (JSONL)");
  calibrate_cmd->add_option("--k", calibrate.k, "Calibration pool size");
  calibrate_cmd->add_option("--write-benchmark", calibrate.write_benchmark,
                            "Also save the simulated benchmark");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample-subset", "Select an evaluation subset");
  sample_cmd->add_option("--matrix", sample.matrix, "Calibration matrix JSON")->required();
  sample_cmd->add_option("--strategy", sample.strategy, "entropy | random | disagreement");
  sample_cmd->add_option("--size", sample.size, "Subset size");

  auto* evolve_cmd = app.add_subcommand("evolve", "Run the NSGA-II merge search");

  FidelityArgs fidelity;
  auto* fidelity_cmd = app.add_subcommand("fidelity", "Rank fidelity of subset strategies");
  fidelity_cmd->add_option("--benchmark", fidelity.benchmark, "Simulated benchmark JSON");
  fidelity_cmd->add_option("--strategies", fidelity.strategies, "Comma-separated strategies");
  fidelity_cmd->add_option("--sizes", fidelity.sizes, "Comma-separated subset sizes");
  fidelity_cmd->add_option("--seeds", fidelity.seeds, "Number of seeds");
  fidelity_cmd->add_option("--models", fidelity.models, "Candidates per seed");
  fidelity_cmd->add_option("--k", fidelity.k, "Calibration pool size");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Aggregate accuracy and length reduction");
  report_cmd->add_option("--records", report.records, "Evaluation records (JSONL)")->required();
  report_cmd->add_option("--candidate", report.candidate, "Candidate id")->required();
  report_cmd->add_option("--baseline", report.baseline, "Baseline candidate id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*merge_cmd) return cmd_merge(merge, global);
    if (*calibrate_cmd) return cmd_calibrate(calibrate, global);
    if (*sample_cmd) return cmd_sample_subset(sample, global);
    if (*evolve_cmd) return cmd_evolve(global);
    if (*fidelity_cmd) return cmd_fidelity(fidelity, global);
    if (*report_cmd) return cmd_report(report, global);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}
