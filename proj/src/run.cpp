// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/run.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include <fmt/core.h>
#include <fmt/format.h>

#include "evomerge/errors.hpp"
#include "evomerge/io_util.hpp"
#include "evomerge/report.hpp"

namespace evomerge {

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorSource& source) {
  if (source.records) {
    if (source.benchmark || source.generator_seed) {
      throw InvalidArgument("configure either a simulated benchmark or a record file, not both");
    }
    return std::make_unique<RecordEvaluator>(load_record_evaluations(*source.records));
  }
  if (source.benchmark) {
    if (source.generator_seed) {
      throw InvalidArgument("configure either a benchmark file or a generator seed, not both");
    }
    const auto text = read_text_file(*source.benchmark);
    return std::make_unique<SimulatedEvaluator>(
        benchmark_from_json(parse_json(text, source.benchmark->string()), source.noise_seed));
  }
  return std::make_unique<SimulatedEvaluator>(generate_benchmark(source.generator_seed.value_or(0)));
}

// ---------------------------------------------------------------------------

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw Error("run config must be a JSON object");
  RunConfig cfg;

  if (j.contains("merge")) {
    const auto& m = j["merge"];
    if (m.contains("kind")) cfg.merge.kind = parse_merge_kind(m["kind"].get<std::string>());
    if (m.contains("system2")) cfg.merge.system2 = m["system2"].get<std::string>();
    if (m.contains("system1")) cfg.merge.system1 = m["system1"].get<std::string>();
  }
  cfg.search = search_config_from_json(j.value("search", Json::object()), cfg.merge.kind);

  if (j.contains("evaluator")) {
    const auto& e = j["evaluator"];
    const bool has_sim = e.contains("simulated");
    const bool has_records = e.contains("records");
    if (has_sim == has_records) {
      throw InvalidArgument("evaluator needs exactly one of 'simulated' or 'records'");
    }
    if (has_records) {
      cfg.evaluator.records = e["records"].get<std::string>();
    } else {
      const auto& s = e["simulated"];
      if (s.contains("benchmark")) cfg.evaluator.benchmark = s["benchmark"].get<std::string>();
      if (s.contains("generator_seed")) {
        cfg.evaluator.generator_seed = s["generator_seed"].get<std::uint64_t>();
      }
      cfg.evaluator.noise_seed = s.value("noise_seed", std::uint64_t{0});
    }
  }

  if (j.contains("subset")) {
    const auto& s = j["subset"];
    if (s.contains("item_ids")) cfg.subset.item_ids = s["item_ids"].get<std::vector<std::string>>();
    cfg.subset.full = s.value("full", false);
    if (s.contains("strategy")) {
      cfg.subset.strategy = parse_subset_strategy(s["strategy"].get<std::string>());
    }
    cfg.subset.size = s.value("size", cfg.subset.size);
    cfg.subset.seed = s.value("seed", cfg.subset.seed);
    cfg.subset.calibration_models = s.value("calibration_models", cfg.subset.calibration_models);
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  cfg.validate();
  return cfg;
}

Json RunConfig::to_json() const {
  Json evaluator_json;
  if (evaluator.records) {
    evaluator_json["records"] = evaluator.records->string();
  } else {
    Json sim = Json::object();
    if (evaluator.benchmark) {
      sim["benchmark"] = evaluator.benchmark->string();
      sim["noise_seed"] = evaluator.noise_seed;
    } else {
      sim["generator_seed"] = evaluator.generator_seed.value_or(0);
    }
    evaluator_json["simulated"] = std::move(sim);
  }
  Json subset_json;
  if (subset.item_ids) {
    subset_json["item_ids"] = *subset.item_ids;
  } else if (subset.full) {
    subset_json["full"] = true;
  } else {
    subset_json = {{"strategy", std::string(to_string(subset.strategy))},
                   {"size", subset.size},
                   {"seed", subset.seed},
                   {"calibration_models", subset.calibration_models}};
  }
  Json merge_json{{"kind", std::string(to_string(merge.kind))}};
  if (merge.system2) merge_json["system2"] = merge.system2->string();
  if (merge.system1) merge_json["system1"] = merge.system1->string();
  return {{"search", search_config_to_json(search)},
          {"evaluator", std::move(evaluator_json)},
          {"subset", std::move(subset_json)},
          {"merge", std::move(merge_json)},
          {"output_dir", output_dir.string()}};
}

void RunConfig::validate() const {
  search.validate();
  if (search.kind != merge.kind) throw InvalidArgument("search kind differs from merge kind");
  if (evaluator.records && (evaluator.benchmark || evaluator.generator_seed)) {
    throw InvalidArgument("configure exactly one evaluator source");
  }
  if (evaluator.simulated() && merge.kind != MergeKind::TA) {
    throw InvalidArgument("the simulated benchmark supports task-arithmetic searches only");
  }
  if (subset.item_ids && subset.item_ids->empty()) {
    throw InvalidArgument("explicit subset must name at least one item");
  }
  if (!subset.item_ids && !subset.full) {
    if (subset.size == 0) throw InvalidArgument("subset size must be positive");
    if (subset.calibration_models < 2) throw InvalidArgument("calibration needs K >= 2");
  }
  if (merge.system2.has_value() != merge.system1.has_value()) {
    throw InvalidArgument("give both merge endpoints or neither");
  }
}

// ---------------------------------------------------------------------------

RecordsRequired::RecordsRequired(std::vector<Genotype> candidates, std::filesystem::path manifest)
    : Error(fmt::format("{} candidate(s) have no evaluation records; manifest written to '{}'",
                        candidates.size(), manifest.string())),
      candidates_(std::move(candidates)),
      manifest_(std::move(manifest)) {}

void write_manifest(const std::filesystem::path& path, const std::vector<Genotype>& candidates) {
  std::string text;
  for (const auto& g : candidates) text += manifest_line(g) + "\n";
  write_file_atomic(path, text);
}

namespace {

/// Sorted by candidate id, duplicates removed.
std::vector<Genotype> canonical_candidates(std::vector<Genotype> candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const Genotype& a, const Genotype& b) {
    return candidate_id(a) < candidate_id(b);
  });
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const Genotype& a, const Genotype& b) {
                                 return candidate_id(a) == candidate_id(b);
                               }),
                   candidates.end());
  return candidates;
}

}  // namespace

CorrectnessMatrix run_calibration(const Evaluator& evaluator, int k, unsigned workers,
                                  const std::filesystem::path& manifest) {
  const auto grid = uniform_lambda_grid(k);
  try {
    return build_calibration_matrix(evaluator, grid, workers);
  } catch (const MissingCandidate&) {
    std::vector<Genotype> missing;
    for (const double lambda : grid) {
      const Genotype g{MergeKind::TA, {lambda}};
      try {
        evaluator.evaluate(g, {});
      } catch (const MissingCandidate&) {
        missing.push_back(g);
      }
    }
    write_manifest(manifest, missing);
    throw RecordsRequired(std::move(missing), manifest);
  }
}

EvaluationSubset resolve_subset(const Evaluator& evaluator, const SubsetSpec& spec,
                                unsigned workers, const std::filesystem::path& manifest) {
  const auto all = evaluator.item_ids();
  if (spec.item_ids) {
    const std::set<std::string> known(all.begin(), all.end());
    for (const auto& id : *spec.item_ids) {
      if (!known.contains(id)) throw InvalidArgument(fmt::format("unknown subset item '{}'", id));
    }
    return {*spec.item_ids, SubsetStrategy::Random, spec.seed};
  }
  if (spec.full) return {all, SubsetStrategy::Random, spec.seed};
  if (spec.size > all.size()) {
    throw InvalidArgument(
        fmt::format("subset size {} exceeds the {} benchmark items", spec.size, all.size()));
  }
  const auto matrix = run_calibration(evaluator, spec.calibration_models, workers, manifest);
  return select_subset(matrix, spec.strategy, spec.size, spec.seed);
}

// ---------------------------------------------------------------------------

namespace {

std::string history_text(std::span<const HistoryEntry> history) {
  std::string text;
  for (const auto& entry : history) text += history_line(entry) + "\n";
  return text;
}

void persist(const std::filesystem::path& dir, std::span<const HistoryEntry> history) {
  write_file_atomic(dir / "history.jsonl", history_text(history));
  if (!history.empty()) {
    write_file_atomic(dir / "pareto.json", pareto_to_json(extract_pareto(history)).dump(2) + "\n");
  }
}

}  // namespace

EvolveOutcome run_evolve(const RunConfig& cfg, unsigned workers) {
  cfg.validate();
  const auto& dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "config.json", cfg.to_json().dump(2) + "\n");

  const auto evaluator = make_evaluator(cfg.evaluator);
  const auto manifest = dir / "candidates.jsonl";
  EvolveOutcome outcome;
  outcome.subset = resolve_subset(*evaluator, cfg.subset, workers, manifest);
  Json subset_json = subset_to_json(outcome.subset);
  subset_json["source"] = cfg.subset.item_ids ? "explicit" : cfg.subset.full ? "full" : "selected";
  write_file_atomic(dir / "subset.json", subset_json.dump(2) + "\n");

  const std::vector<std::string>& items = outcome.subset.item_ids;
  std::mutex missing_mutex;
  std::vector<Genotype> missing;
  const EvaluateFn evaluate = [&](const Genotype& g) {
    try {
      const auto outcomes = evaluator->evaluate(g, items);
      return compute_objectives(outcomes);
    } catch (const MissingCandidate&) {
      const std::lock_guard lock(missing_mutex);
      missing.push_back(g);
      throw;
    }
  };

  SearchOptions options;
  options.workers = workers;
  options.on_generation = [&](const Population&, std::span<const HistoryEntry> history) {
    persist(dir, history);
  };
  try {
    outcome.search = run_nsga2(cfg.search, evaluate, options);
  } catch (const SearchAborted& aborted) {
    persist(dir, aborted.partial_history());
    if (!missing.empty()) {
      auto candidates = canonical_candidates(std::move(missing));
      write_manifest(manifest, candidates);
      throw RecordsRequired(std::move(candidates), manifest);
    }
    throw;
  }

  // Length reduction is measured against the System-2 endpoint (TA λ = 0).
  std::optional<ObjectiveVector> baseline;
  try {
    baseline = compute_objectives(evaluator->evaluate({MergeKind::TA, {0.0}}, items));
  } catch (const MissingCandidate&) {
  }
  const auto* simulated = dynamic_cast<const SimulatedEvaluator*>(evaluator.get());
  for (const auto& [g, objectives] : outcome.search.front.members) {
    FrontRow row{g, objectives, std::nullopt, std::nullopt};
    if (simulated) row.full = compute_objectives(simulated->evaluate(g, {}));
    if (baseline && baseline->mean_length > 0.0) {
      row.length_reduction = length_reduction_percent(objectives.mean_length, baseline->mean_length);
    }
    outcome.front.push_back(std::move(row));
  }
  write_file_atomic(dir / "front.csv", front_csv(outcome.front));
  return outcome;
}

std::string front_table(const std::vector<FrontRow>& rows) {
  std::string out = fmt::format("{:<28} {:>9} {:>11} {:>10} {:>11}\n", "candidate", "acc (%)",
                                "mean len", "reduction", "full acc %");
  for (const auto& row : rows) {
    out += fmt::format("{:<28} {:>9.1f} {:>11.1f} {:>10} {:>11}\n", candidate_id(row.genotype),
                       100.0 * row.subset.accuracy, row.subset.mean_length,
                       row.length_reduction ? fmt::format("{:.1f}%", *row.length_reduction) : "-",
                       row.full ? fmt::format("{:.1f}", 100.0 * row.full->accuracy) : "-");
  }
  return out;
}

std::string front_csv(const std::vector<FrontRow>& rows) {
  std::string out =
      "candidate_id,length_reduction_pct,accuracy_pct,mean_length,full_accuracy_pct,"
      "full_mean_length\n";
  for (const auto& row : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", candidate_id(row.genotype),
                       row.length_reduction ? fmt::format("{}", *row.length_reduction) : "",
                       100.0 * row.subset.accuracy, row.subset.mean_length,
                       row.full ? fmt::format("{}", 100.0 * row.full->accuracy) : "",
                       row.full ? fmt::format("{}", row.full->mean_length) : "");
  }
  return out;
}

std::string fidelity_csv(std::span<const FidelityRow> rows) {
  std::string out = "strategy,size,seed,rho\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", to_string(r.strategy), r.size, r.seed, r.rho);
  }
  return out;
}

std::string fidelity_mean_csv(std::span<const FidelityMean> rows) {
  std::string out = "strategy,size,mean_rho,seeds\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", to_string(r.strategy), r.size, r.mean_rho, r.seeds);
  }
  return out;
}

std::map<std::string, std::vector<ItemOutcome>> group_by_benchmark(
    std::span<const ItemOutcome> outcomes) {
  std::map<std::string, std::vector<ItemOutcome>> groups;
  for (const auto& o : outcomes) {
    const auto slash = o.item_id.find('/');
    const std::string name = slash == std::string::npos ? "all" : o.item_id.substr(0, slash);
    groups[name].push_back(o);
  }
  return groups;
}

}  // namespace evomerge
