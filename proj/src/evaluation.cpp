// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/core.h>
#include <json.hpp>

#include "evomerge/errors.hpp"
#include "evomerge/io_util.hpp"
#include "evomerge/rng.hpp"

namespace evomerge {

ObjectiveVector compute_objectives(std::span<const ItemOutcome> outcomes) {
  if (outcomes.empty()) throw InvalidArgument("cannot compute objectives of an empty outcome list");
  double solved = 0.0;
  double length = 0.0;
  for (const auto& o : outcomes) {
    solved += o.correct ? 1.0 : 0.0;
    length += o.length;
  }
  const auto n = static_cast<double>(outcomes.size());
  return {solved / n, length / n};
}

std::string_view to_string(ResponseKind kind) noexcept {
  switch (kind) {
    case ResponseKind::ThresholdUp: return "THRESHOLD_UP";
    case ResponseKind::ThresholdDown: return "THRESHOLD_DOWN";
    case ResponseKind::Logistic: return "LOGISTIC";
  }
  return "?";
}

ResponseKind parse_response_kind(std::string_view name) {
  if (name == "THRESHOLD_UP") return ResponseKind::ThresholdUp;
  if (name == "THRESHOLD_DOWN") return ResponseKind::ThresholdDown;
  if (name == "LOGISTIC") return ResponseKind::Logistic;
  throw InvalidArgument(fmt::format("unknown response_kind '{}'", name));
}

SimulatedBenchmark::SimulatedBenchmark(std::vector<SimItem> items, std::uint64_t noise_seed)
    : items_(std::move(items)), noise_seed_(noise_seed) {
  index_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    if (item.item_id.empty()) throw InvalidArgument("item_id must be non-empty");
    if (!(item.t >= 0.0 && item.t <= 1.0)) {
      throw InvalidArgument(fmt::format("item '{}': t = {} outside [0, 1]", item.item_id, item.t));
    }
    if (item.response_kind == ResponseKind::Logistic && !(item.a > 0.0)) {
      throw InvalidArgument(fmt::format("item '{}': slope a must be positive", item.item_id));
    }
    if (!(item.len_short >= 0.0 && item.len_long >= item.len_short)) {
      throw InvalidArgument(
          fmt::format("item '{}': need len_long >= len_short >= 0", item.item_id));
    }
    if (!index_.emplace(item.item_id, i).second) {
      throw InvalidArgument(fmt::format("duplicate item_id '{}'", item.item_id));
    }
  }
}

std::size_t SimulatedBenchmark::index_of(std::string_view item_id) const {
  const auto it = index_.find(std::string(item_id));
  if (it == index_.end()) throw InvalidArgument(fmt::format("unknown item id '{}'", item_id));
  return it->second;
}

bool SimulatedBenchmark::solves(std::size_t index, double lambda) const {
  const SimItem& item = items_[index];
  switch (item.response_kind) {
    case ResponseKind::ThresholdUp: return lambda >= item.t;
    case ResponseKind::ThresholdDown: return lambda <= item.t;
    case ResponseKind::Logistic: {
      const auto bucket = static_cast<std::int64_t>(std::llround(lambda * 1e6));
      auto engine = substream(noise_seed_, "logistic", fnv1a64(item.item_id),
                              static_cast<std::uint64_t>(bucket));
      return uniform01(engine) < logistic_response(item.a, item.t, lambda);
    }
  }
  return false;
}

double SimulatedBenchmark::length(std::size_t index, double lambda) const {
  const SimItem& item = items_[index];
  return item.len_long + (item.len_short - item.len_long) * lambda;
}

double SimulatedBenchmark::max_length() const noexcept {
  double best = 0.0;
  for (const auto& item : items_) best = std::max(best, item.len_long);
  return best;
}

SimulatedBenchmark generate_benchmark(std::uint64_t seed, const GeneratorOptions& options) {
  const std::size_t n = options.item_count;
  const auto n_up = static_cast<std::size_t>(std::llround(options.up_fraction * static_cast<double>(n)));
  const auto n_down =
      static_cast<std::size_t>(std::llround(options.down_fraction * static_cast<double>(n)));
  if (n_up + n_down > n) throw InvalidArgument("up and down fractions exceed the item count");

  std::vector<ResponseKind> kinds(n, ResponseKind::Logistic);
  std::fill_n(kinds.begin(), n_up, ResponseKind::ThresholdUp);
  std::fill_n(kinds.begin() + static_cast<std::ptrdiff_t>(n_up), n_down,
              ResponseKind::ThresholdDown);
  auto shuffle_engine = substream(seed, "generator-kinds");
  std::shuffle(kinds.begin(), kinds.end(), shuffle_engine);

  auto engine = substream(seed, "generator-items");
  std::vector<SimItem> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SimItem item;
    item.item_id = fmt::format("sim-{:04d}", i);
    item.response_kind = kinds[i];
    item.t = uniform01(engine);
    const double slope = uniform(engine, options.slope_low, options.slope_high);
    item.a = kinds[i] == ResponseKind::Logistic ? slope : 1.0;
    item.len_long = uniform(engine, options.len_long_low, options.len_long_high);
    item.len_short = uniform(engine, options.len_short_low, options.len_short_high);
    items.push_back(std::move(item));
  }
  return SimulatedBenchmark(std::move(items), seed);
}

std::vector<ItemOutcome> evaluate_simulated(const SimulatedBenchmark& bench, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument(fmt::format("lambda {} outside [0, 1]", lambda));
  }
  std::vector<ItemOutcome> out;
  out.reserve(bench.size());
  for (std::size_t i = 0; i < bench.size(); ++i) {
    out.push_back({bench.items()[i].item_id, bench.solves(i, lambda), bench.length(i, lambda)});
  }
  return out;
}

std::vector<ItemOutcome> evaluate_simulated(const SimulatedBenchmark& bench, double lambda,
                                            std::span<const std::string> subset) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument(fmt::format("lambda {} outside [0, 1]", lambda));
  }
  std::vector<ItemOutcome> out;
  out.reserve(subset.size());
  for (const auto& id : subset) {
    const std::size_t i = bench.index_of(id);
    out.push_back({id, bench.solves(i, lambda), bench.length(i, lambda)});
  }
  return out;
}

// ---------------------------------------------------------------------------

RecordSet parse_record_evaluations(std::string_view text) {
  RecordSet records;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto fail = [&](const std::string& what) {
      return Error(fmt::format("records line {}: {}", line_no, what));
    };
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(fmt::format("malformed JSON ({})", e.what()));
    }
    if (!obj.is_object()) throw fail("expected a JSON object");
    for (const char* field : {"candidate_id", "item_id", "correct", "length"}) {
      if (!obj.contains(field)) throw fail(fmt::format("missing field '{}'", field));
    }
    if (!obj["candidate_id"].is_string() || !obj["item_id"].is_string()) {
      throw fail("candidate_id and item_id must be strings");
    }
    auto candidate = obj["candidate_id"].get<std::string>();
    auto item = obj["item_id"].get<std::string>();
    if (candidate.empty() || item.empty()) throw fail("candidate_id and item_id must be non-empty");

    const auto& correct = obj["correct"];
    bool solved = false;
    if (correct.is_boolean()) {
      solved = correct.get<bool>();
    } else if (correct.is_number_integer() && (correct == 0 || correct == 1)) {
      solved = correct == 1;
    } else {
      throw fail(fmt::format("correctness must be 0/1, got {}", correct.dump()));
    }
    if (!obj["length"].is_number()) throw fail("length must be a number");
    const double length = obj["length"].get<double>();
    if (!(length >= 0.0) || !std::isfinite(length)) throw fail("length must be finite and >= 0");

    if (!seen.emplace(candidate, item).second) {
      throw fail(fmt::format("duplicate record for (candidate '{}', item '{}')", candidate, item));
    }
    records[candidate].push_back({std::move(item), solved, length});
  }
  return records;
}

RecordSet load_record_evaluations(const std::filesystem::path& path) {
  try {
    return parse_record_evaluations(read_text_file(path));
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

MissingCandidate::MissingCandidate(std::string id)
    : Error(fmt::format("no evaluation records for candidate '{}'", id)), candidate_(std::move(id)) {}

// ---------------------------------------------------------------------------

std::vector<std::string> SimulatedEvaluator::item_ids() const {
  std::vector<std::string> ids;
  ids.reserve(bench_.size());
  for (const auto& item : bench_.items()) ids.push_back(item.item_id);
  return ids;
}

std::vector<ItemOutcome> SimulatedEvaluator::evaluate(const Genotype& g,
                                                      std::span<const std::string> subset) const {
  if (g.kind != MergeKind::TA) {
    throw InvalidArgument(fmt::format(
        "the simulated benchmark models task-arithmetic candidates only, got '{}'",
        to_string(g.kind)));
  }
  validate_genotype(g);
  return subset.empty() ? evaluate_simulated(bench_, g.values[0])
                        : evaluate_simulated(bench_, g.values[0], subset);
}

RecordEvaluator::RecordEvaluator(RecordSet records) : records_(std::move(records)) {
  std::set<std::string> ids;
  for (const auto& [candidate, outcomes] : records_) {
    auto& index = by_item_[candidate];
    for (const auto& o : outcomes) {
      index.emplace(o.item_id, o);
      ids.insert(o.item_id);
    }
  }
  item_ids_.assign(ids.begin(), ids.end());
}

std::vector<std::string> RecordEvaluator::item_ids() const { return item_ids_; }

std::vector<ItemOutcome> RecordEvaluator::evaluate(const Genotype& g,
                                                   std::span<const std::string> subset) const {
  const std::string id = candidate_id(g);
  const auto it = by_item_.find(id);
  if (it == by_item_.end()) throw MissingCandidate(id);
  const std::span<const std::string> wanted =
      subset.empty() ? std::span<const std::string>(item_ids_) : subset;
  std::vector<ItemOutcome> out;
  out.reserve(wanted.size());
  for (const auto& item : wanted) {
    const auto found = it->second.find(item);
    if (found == it->second.end()) {
      throw Error(fmt::format("no record for (candidate '{}', item '{}')", id, item));
    }
    out.push_back(found->second);
  }
  return out;
}

}  // namespace evomerge
