// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "evomerge/evaluation.hpp"
#include "evomerge/moea.hpp"
#include "evomerge/subset.hpp"

namespace evomerge {

using Json = nlohmann::json;

/// Parses JSON text, rethrowing parse failures as Error prefixed by `what`.
Json parse_json(std::string_view text, std::string_view what);

Json genotype_to_json(const Genotype& g);
Genotype genotype_from_json(const Json& j);

/// JSON array of SimItem objects.
Json benchmark_to_json(const SimulatedBenchmark& bench);
SimulatedBenchmark benchmark_from_json(const Json& j, std::uint64_t noise_seed);

/// `{"model_ids", "item_ids", "correct", "lengths"}`.
Json matrix_to_json(const CorrectnessMatrix& m);
CorrectnessMatrix matrix_from_json(const Json& j);

/// `{"strategy", "seed", "item_ids"}`.
Json subset_to_json(const EvaluationSubset& s);
EvaluationSubset subset_from_json(const Json& j);

Json search_config_to_json(const SearchConfig& cfg);
/// Missing fields take the defaults of `SearchConfig::defaults_for(kind)`.
SearchConfig search_config_from_json(const Json& j, MergeKind kind);

/// One `history.jsonl` line (no trailing newline).
std::string history_line(const HistoryEntry& entry);
Json pareto_to_json(const ParetoFront& front);

/// One candidate-manifest line: `{"candidate_id", "genotype"}`.
std::string manifest_line(const Genotype& g);

}  // namespace evomerge
