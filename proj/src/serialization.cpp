// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/serialization.hpp"

#include <fmt/core.h>

#include "evomerge/errors.hpp"

namespace evomerge {

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(fmt::format("{}: malformed JSON ({})", what, e.what()));
  }
}

namespace {

template <typename T>
T field(const Json& j, const char* name, std::string_view context) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(fmt::format("{}: missing field '{}'", context, name));
  }
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception& e) {
    throw Error(fmt::format("{}: field '{}' has the wrong type ({})", context, name, e.what()));
  }
}

template <typename T>
T field_or(const Json& j, const char* name, T fallback, std::string_view context) {
  if (!j.contains(name) || j.at(name).is_null()) return fallback;
  return field<T>(j, name, context);
}

}  // namespace

Json genotype_to_json(const Genotype& g) {
  return {{"kind", std::string(to_string(g.kind))}, {"values", g.values}};
}

Genotype genotype_from_json(const Json& j) {
  return {parse_merge_kind(field<std::string>(j, "kind", "genotype")),
          field<std::vector<double>>(j, "values", "genotype")};
}

Json benchmark_to_json(const SimulatedBenchmark& bench) {
  Json out = Json::array();
  for (const auto& item : bench.items()) {
    out.push_back({{"item_id", item.item_id},
                   {"response_kind", std::string(to_string(item.response_kind))},
                   {"t", item.t},
                   {"a", item.a},
                   {"len_long", item.len_long},
                   {"len_short", item.len_short}});
  }
  return out;
}

SimulatedBenchmark benchmark_from_json(const Json& j, std::uint64_t noise_seed) {
  if (!j.is_array()) throw Error("simulated benchmark must be a JSON array of items");
  std::vector<SimItem> items;
  items.reserve(j.size());
  for (const auto& e : j) {
    SimItem item;
    item.item_id = field<std::string>(e, "item_id", "benchmark item");
    item.response_kind = parse_response_kind(field<std::string>(e, "response_kind", item.item_id));
    item.t = field<double>(e, "t", item.item_id);
    item.a = field_or<double>(e, "a", 1.0, item.item_id);
    item.len_long = field<double>(e, "len_long", item.item_id);
    item.len_short = field<double>(e, "len_short", item.item_id);
    items.push_back(std::move(item));
  }
  return SimulatedBenchmark(std::move(items), noise_seed);
}

Json matrix_to_json(const CorrectnessMatrix& m) {
  Json correct = Json::array();
  Json lengths = Json::array();
  for (Eigen::Index r = 0; r < m.correct.rows(); ++r) {
    Json crow = Json::array();
    Json lrow = Json::array();
    for (Eigen::Index c = 0; c < m.correct.cols(); ++c) {
      crow.push_back(static_cast<int>(m.correct(r, c)));
      lrow.push_back(m.lengths(r, c));
    }
    correct.push_back(std::move(crow));
    lengths.push_back(std::move(lrow));
  }
  return {{"model_ids", m.model_ids},
          {"item_ids", m.item_ids},
          {"correct", std::move(correct)},
          {"lengths", std::move(lengths)}};
}

CorrectnessMatrix matrix_from_json(const Json& j) {
  constexpr std::string_view ctx = "correctness matrix";
  CorrectnessMatrix m;
  m.model_ids = field<std::vector<std::string>>(j, "model_ids", ctx);
  m.item_ids = field<std::vector<std::string>>(j, "item_ids", ctx);
  const auto correct = field<std::vector<std::vector<int>>>(j, "correct", ctx);
  const auto lengths = field<std::vector<std::vector<double>>>(j, "lengths", ctx);
  const auto rows = static_cast<Eigen::Index>(m.model_ids.size());
  const auto cols = static_cast<Eigen::Index>(m.item_ids.size());
  if (static_cast<Eigen::Index>(correct.size()) != rows ||
      static_cast<Eigen::Index>(lengths.size()) != rows) {
    throw InvalidArgument("correctness matrix: row count differs from model_ids");
  }
  m.correct.resize(rows, cols);
  m.lengths.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& crow = correct[static_cast<std::size_t>(r)];
    const auto& lrow = lengths[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(crow.size()) != cols ||
        static_cast<Eigen::Index>(lrow.size()) != cols) {
      throw InvalidArgument(fmt::format("correctness matrix: row {} has the wrong width", r));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const int v = crow[static_cast<std::size_t>(c)];
      if (v != 0 && v != 1) {
        throw InvalidArgument(fmt::format("correctness matrix: entry ({}, {}) is {}", r, c, v));
      }
      m.correct(r, c) = static_cast<std::uint8_t>(v);
      m.lengths(r, c) = lrow[static_cast<std::size_t>(c)];
    }
  }
  m.validate();
  return m;
}

Json subset_to_json(const EvaluationSubset& s) {
  return {{"strategy", std::string(to_string(s.strategy))},
          {"seed", s.seed},
          {"item_ids", s.item_ids}};
}

EvaluationSubset subset_from_json(const Json& j) {
  EvaluationSubset s;
  s.strategy = parse_subset_strategy(field<std::string>(j, "strategy", "subset"));
  s.seed = field_or<std::uint64_t>(j, "seed", 0, "subset");
  s.item_ids = field<std::vector<std::string>>(j, "item_ids", "subset");
  if (s.item_ids.empty()) throw InvalidArgument("subset must name at least one item");
  return s;
}

Json search_config_to_json(const SearchConfig& cfg) {
  Json bounds = Json::array();
  for (const auto& b : cfg.bounds) bounds.push_back({b.low, b.high});
  return {{"population_size", cfg.population_size},
          {"generations", cfg.generations},
          {"seed", cfg.seed},
          {"kind", std::string(to_string(cfg.kind))},
          {"sbx",
           {{"probability", cfg.sbx.probability},
            {"distribution_index", cfg.sbx.distribution_index}}},
          {"mutation",
           {{"probability", cfg.mutation_probability()},
            {"distribution_index", cfg.mutation.distribution_index}}},
          {"bounds", std::move(bounds)}};
}

SearchConfig search_config_from_json(const Json& j, MergeKind kind) {
  constexpr std::string_view ctx = "search config";
  if (!j.is_object()) throw Error("search config must be a JSON object");
  if (j.contains("kind") && parse_merge_kind(field<std::string>(j, "kind", ctx)) != kind) {
    throw InvalidArgument("search.kind disagrees with merge.kind");
  }
  SearchConfig cfg = SearchConfig::defaults_for(kind);
  cfg.population_size = field_or<int>(j, "population_size", cfg.population_size, ctx);
  cfg.generations = field_or<int>(j, "generations", cfg.generations, ctx);
  cfg.seed = field_or<std::uint64_t>(j, "seed", cfg.seed, ctx);
  if (j.contains("sbx")) {
    const auto& s = j["sbx"];
    cfg.sbx.probability = field_or<double>(s, "probability", cfg.sbx.probability, ctx);
    cfg.sbx.distribution_index =
        field_or<double>(s, "distribution_index", cfg.sbx.distribution_index, ctx);
  }
  if (j.contains("mutation")) {
    const auto& m = j["mutation"];
    if (m.contains("probability") && !m["probability"].is_null()) {
      cfg.mutation.probability = field<double>(m, "probability", ctx);
    }
    cfg.mutation.distribution_index =
        field_or<double>(m, "distribution_index", cfg.mutation.distribution_index, ctx);
  }
  if (j.contains("bounds")) {
    cfg.bounds.clear();
    for (const auto& b : field<std::vector<std::vector<double>>>(j, "bounds", ctx)) {
      if (b.size() != 2) throw InvalidArgument("each bound must be a [low, high] pair");
      cfg.bounds.push_back({b[0], b[1]});
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

Json member_json(const Genotype& g, const ObjectiveVector& o) {
  const auto f = o.fitness();
  return {{"candidate_id", candidate_id(g)},
          {"genotype", genotype_to_json(g)},
          {"accuracy", o.accuracy},
          {"mean_length", o.mean_length},
          {"fitness", {f[0], f[1]}}};
}

}  // namespace

std::string history_line(const HistoryEntry& entry) {
  Json j = member_json(entry.genotype, entry.objectives);
  j["generation"] = entry.generation;
  return j.dump();
}

Json pareto_to_json(const ParetoFront& front) {
  Json members = Json::array();
  for (const auto& [g, o] : front.members) members.push_back(member_json(g, o));
  return {{"members", std::move(members)}};
}

std::string manifest_line(const Genotype& g) {
  return Json{{"candidate_id", candidate_id(g)}, {"genotype", genotype_to_json(g)}}.dump();
}

}  // namespace evomerge
