// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "evomerge/evaluation.hpp"

namespace evomerge {

struct BenchmarkRow {
  std::string name;
  std::size_t item_count = 0;
  double accuracy = 0.0;  ///< fraction in [0, 1]
  double mean_length = 0.0;
  double baseline_mean_length = 0.0;
  /// 100·(1 − mean_length / baseline_mean_length); negative when longer.
  double length_reduction = 0.0;
};

struct AggregateReport {
  std::vector<BenchmarkRow> rows;
  /// Unweighted mean of per-benchmark accuracies.
  double average = 0.0;
  /// Σ(accuracy·item_count) / Σ item_count.
  double weighted_average = 0.0;
  /// Item-weighted mean lengths of candidate and baseline.
  double mean_length = 0.0;
  double baseline_mean_length = 0.0;
  /// Reduction of the item-weighted mean length against the baseline.
  double length_reduction = 0.0;
};

/// 100·(1 − length / baseline). Throws InvalidArgument when baseline ≤ 0.
double length_reduction_percent(double length, double baseline);

/// Unweighted mean of row accuracies.
double mean_accuracy(std::span<const BenchmarkRow> rows);
/// Σ(accuracy·item_count) / Σ item_count.
double weighted_accuracy(std::span<const BenchmarkRow> rows);

/// Per-benchmark and pooled accuracy/length of `groups` against `baseline`.
/// Both maps must name the same benchmarks and no group may be empty.
AggregateReport build_report(const std::map<std::string, std::vector<ItemOutcome>>& groups,
                             const std::map<std::string, std::vector<ItemOutcome>>& baseline);

/// Machine-readable form: one row per benchmark then "Avg." and "W-Avg." rows.
std::string report_csv(const AggregateReport& report);
/// Aligned human-readable table.
std::string report_text(const AggregateReport& report);

}  // namespace evomerge
