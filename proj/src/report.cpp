// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/report.hpp"

#include <fmt/core.h>

#include "evomerge/errors.hpp"

namespace evomerge {

double length_reduction_percent(double length, double baseline) {
  if (!(baseline > 0.0)) throw InvalidArgument("baseline length must be positive");
  return 100.0 * (1.0 - length / baseline);
}

double mean_accuracy(std::span<const BenchmarkRow> rows) {
  if (rows.empty()) throw InvalidArgument("no benchmark rows");
  double sum = 0.0;
  for (const auto& row : rows) sum += row.accuracy;
  return sum / static_cast<double>(rows.size());
}

double weighted_accuracy(std::span<const BenchmarkRow> rows) {
  double sum = 0.0;
  double count = 0.0;
  for (const auto& row : rows) {
    sum += row.accuracy * static_cast<double>(row.item_count);
    count += static_cast<double>(row.item_count);
  }
  if (!(count > 0.0)) throw InvalidArgument("no benchmark items");
  return sum / count;
}

AggregateReport build_report(const std::map<std::string, std::vector<ItemOutcome>>& groups,
                             const std::map<std::string, std::vector<ItemOutcome>>& baseline) {
  if (groups.empty()) throw InvalidArgument("report needs at least one benchmark");
  for (const auto& [name, outcomes] : baseline) {
    if (!groups.contains(name)) {
      throw InvalidArgument(fmt::format("benchmark '{}' missing from candidate results", name));
    }
  }

  AggregateReport report;
  double weighted_length = 0.0;
  double weighted_baseline = 0.0;
  std::size_t total = 0;
  std::size_t baseline_total = 0;
  for (const auto& [name, outcomes] : groups) {
    const auto base = baseline.find(name);
    if (base == baseline.end()) {
      throw InvalidArgument(fmt::format("benchmark '{}' missing from baseline results", name));
    }
    if (outcomes.empty() || base->second.empty()) {
      throw InvalidArgument(fmt::format("benchmark '{}' has no outcomes", name));
    }
    const auto candidate = compute_objectives(outcomes);
    const auto reference = compute_objectives(base->second);

    BenchmarkRow row{name,
                     outcomes.size(),
                     candidate.accuracy,
                     candidate.mean_length,
                     reference.mean_length,
                     length_reduction_percent(candidate.mean_length, reference.mean_length)};
    const auto count = static_cast<double>(row.item_count);
    weighted_length += row.mean_length * count;
    weighted_baseline += reference.mean_length * static_cast<double>(base->second.size());
    total += row.item_count;
    baseline_total += base->second.size();
    report.rows.push_back(std::move(row));
  }
  report.average = mean_accuracy(report.rows);
  report.weighted_average = weighted_accuracy(report.rows);
  report.mean_length = weighted_length / static_cast<double>(total);
  report.baseline_mean_length = weighted_baseline / static_cast<double>(baseline_total);
  report.length_reduction = length_reduction_percent(report.mean_length, report.baseline_mean_length);
  return report;
}

std::string report_csv(const AggregateReport& report) {
  std::string out = "benchmark,item_count,accuracy_pct,mean_length,baseline_mean_length,length_reduction_pct\n";
  for (const auto& row : report.rows) {
    out += fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n", row.name, row.item_count,
                       100.0 * row.accuracy, row.mean_length, row.baseline_mean_length,
                       row.length_reduction);
  }
  std::size_t total = 0;
  for (const auto& row : report.rows) total += row.item_count;
  out += fmt::format("Avg.,{},{:.4f},,,\n", total, 100.0 * report.average);
  out += fmt::format("W-Avg.,{},{:.4f},{:.4f},{:.4f},{:.4f}\n", total,
                     100.0 * report.weighted_average, report.mean_length,
                     report.baseline_mean_length, report.length_reduction);
  return out;
}

std::string report_text(const AggregateReport& report) {
  std::string out = fmt::format("{:<20} {:>7} {:>9} {:>11} {:>11}\n", "benchmark", "items",
                                "acc (%)", "mean len", "reduction");
  for (const auto& row : report.rows) {
    out += fmt::format("{:<20} {:>7} {:>9.1f} {:>11.1f} {:>10.1f}%\n", row.name, row.item_count,
                       100.0 * row.accuracy, row.mean_length, row.length_reduction);
  }
  out += fmt::format("{:<20} {:>7} {:>9.1f}\n", "Avg.", "", 100.0 * report.average);
  out += fmt::format("{:<20} {:>7} {:>9.1f} {:>11.1f} {:>10.1f}%\n", "W-Avg.", "",
                     100.0 * report.weighted_average, report.mean_length, report.length_reduction);
  return out;
}

}  // namespace evomerge
