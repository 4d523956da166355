// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/subset.hpp"

#include <map>
#include <unordered_set>

#include <fmt/core.h>

#include "evomerge/parallel.hpp"
#include "evomerge/rng.hpp"

namespace evomerge {

void CorrectnessMatrix::validate() const {
  if (static_cast<Eigen::Index>(model_ids.size()) != correct.rows() ||
      static_cast<Eigen::Index>(item_ids.size()) != correct.cols()) {
    throw InvalidArgument(fmt::format(
        "correctness matrix is {}x{} but has {} model ids and {} item ids", correct.rows(),
        correct.cols(), model_ids.size(), item_ids.size()));
  }
  if (lengths.rows() != correct.rows() || lengths.cols() != correct.cols()) {
    throw InvalidArgument("length matrix shape differs from correctness matrix");
  }
  if (correct.rows() < 2) throw InvalidArgument("calibration needs at least two models");
  if ((correct > 1).any()) throw InvalidArgument("correctness entries must be 0 or 1");
  if (!(lengths >= 0.0).all()) throw InvalidArgument("lengths must be non-negative");
  std::unordered_set<std::string> seen;
  for (const auto& id : item_ids) {
    if (!seen.insert(id).second) throw InvalidArgument(fmt::format("duplicate item id '{}'", id));
  }
}

std::size_t CorrectnessMatrix::item_index(std::string_view item_id) const {
  const auto it = std::find(item_ids.begin(), item_ids.end(), item_id);
  if (it == item_ids.end()) throw InvalidArgument(fmt::format("unknown item '{}'", item_id));
  return static_cast<std::size_t>(it - item_ids.begin());
}

std::vector<double> uniform_lambda_grid(int k) {
  if (k < 2) throw InvalidArgument(fmt::format("calibration pool needs K >= 2, got {}", k));
  std::vector<double> grid(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (k - 1);
  return grid;
}

CorrectnessMatrix build_calibration_matrix(const Evaluator& evaluator, std::span<const double> grid,
                                           unsigned workers) {
  if (grid.size() < 2) throw InvalidArgument("calibration grid needs at least two values");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) {
      throw InvalidArgument(fmt::format("grid value {} outside [0, 1]", grid[k]));
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw InvalidArgument("calibration grid must be strictly increasing");
    }
  }

  CorrectnessMatrix m;
  m.item_ids = evaluator.item_ids();
  const auto rows = static_cast<Eigen::Index>(grid.size());
  const auto cols = static_cast<Eigen::Index>(m.item_ids.size());
  m.correct.resize(rows, cols);
  m.lengths.resize(rows, cols);
  for (const double lambda : grid) m.model_ids.push_back(candidate_id({MergeKind::TA, {lambda}}));

  parallel_for(grid.size(), workers, [&](std::size_t k) {
    const auto outcomes = evaluator.evaluate({MergeKind::TA, {grid[k]}}, m.item_ids);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& o = outcomes[static_cast<std::size_t>(j)];
      m.correct(static_cast<Eigen::Index>(k), j) = o.correct ? 1 : 0;
      m.lengths(static_cast<Eigen::Index>(k), j) = o.length;
    }
  });
  return m;
}

double empirical_solve_rate(const CorrectnessMatrix& m, std::string_view item_id) {
  const auto j = static_cast<Eigen::Index>(m.item_index(item_id));
  return m.correct.col(j).cast<double>().mean();
}

Eigen::ArrayXd solve_rates(const CorrectnessMatrix& m) {
  return m.correct.cast<double>().colwise().mean().transpose();
}

std::vector<ItemStats> item_stats(const CorrectnessMatrix& m) {
  const Eigen::ArrayXd p = solve_rates(m);
  std::vector<ItemStats> out;
  out.reserve(m.item_ids.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    out.push_back({m.item_ids[static_cast<std::size_t>(j)], p[j], bernoulli_entropy(p[j])});
  }
  return out;
}

std::string_view to_string(SubsetStrategy strategy) noexcept {
  switch (strategy) {
    case SubsetStrategy::Entropy: return "entropy";
    case SubsetStrategy::Random: return "random";
    case SubsetStrategy::Disagreement: return "disagreement";
  }
  return "?";
}

SubsetStrategy parse_subset_strategy(std::string_view name) {
  if (name == "entropy") return SubsetStrategy::Entropy;
  if (name == "random") return SubsetStrategy::Random;
  if (name == "disagreement") return SubsetStrategy::Disagreement;
  throw InvalidArgument(
      fmt::format("unknown strategy '{}' (expected entropy|random|disagreement)", name));
}

namespace {

std::vector<std::size_t> select_columns(const CorrectnessMatrix& m, SubsetStrategy strategy,
                                        std::size_t size, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(m.items());
  if (size == 0) throw InvalidArgument("subset size must be positive");
  if (size > n) {
    throw InvalidArgument(fmt::format("subset size {} exceeds item count {}", size, n));
  }

  std::vector<std::size_t> chosen;
  switch (strategy) {
    case SubsetStrategy::Entropy: {
      const Eigen::ArrayXd h = bernoulli_entropy(solve_rates(m));
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return h[static_cast<Eigen::Index>(a)] > h[static_cast<Eigen::Index>(b)];
      });
      chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
      break;
    }
    case SubsetStrategy::Random: {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      auto engine = substream(seed, "subset-random");
      std::shuffle(all.begin(), all.end(), engine);
      chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
      break;
    }
    case SubsetStrategy::Disagreement: {
      const auto first = m.correct.row(0);
      const auto last = m.correct.row(m.models() - 1);
      for (std::size_t j = 0; j < n && chosen.size() < size; ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        if (first(c) != last(c)) chosen.push_back(j);
      }
      if (chosen.size() < size) {
        throw Error(fmt::format("only {} items disagree between the endpoint rows; {} requested",
                                chosen.size(), size));
      }
      break;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

EvaluationSubset select_subset(const CorrectnessMatrix& m, SubsetStrategy strategy,
                               std::size_t size, std::uint64_t seed) {
  m.validate();
  EvaluationSubset subset{{}, strategy, seed};
  for (const auto j : select_columns(m, strategy, size, seed)) {
    subset.item_ids.push_back(m.item_ids[j]);
  }
  return subset;
}

std::vector<FidelityRow> rank_fidelity_curve(const SimulatedBenchmark& bench,
                                             std::span<const SubsetStrategy> strategies,
                                             std::span<const std::size_t> sizes,
                                             std::size_t n_models,
                                             std::span<const std::uint64_t> seeds,
                                             const FidelityOptions& options) {
  if (n_models < 2) throw InvalidArgument("rank fidelity needs at least two models");
  const std::size_t n = bench.size();
  for (const auto s : sizes) {
    if (s == 0 || s > n) {
      throw InvalidArgument(fmt::format("subset size {} outside [1, {}]", s, n));
    }
  }

  const SimulatedEvaluator evaluator(bench);
  const auto grid = uniform_lambda_grid(options.calibration_models);
  const CorrectnessMatrix calibration = build_calibration_matrix(evaluator, grid, options.workers);

  // Seed-independent subsets are computed once per (strategy, size).
  std::map<std::pair<SubsetStrategy, std::size_t>, std::vector<std::size_t>> fixed;
  for (const auto strategy : strategies) {
    if (strategy == SubsetStrategy::Random) continue;
    for (const auto size : sizes) {
      if (size == n) continue;
      fixed[{strategy, size}] = select_columns(calibration, strategy, size, 0);
    }
  }

  std::vector<std::size_t> all_columns(n);
  std::iota(all_columns.begin(), all_columns.end(), std::size_t{0});

  const std::size_t cells = strategies.size() * sizes.size();
  std::vector<FidelityRow> rows(seeds.size() * cells);
  parallel_for(seeds.size(), options.workers, [&](std::size_t s) {
    const std::uint64_t seed = seeds[s];
    auto engine = substream(seed, "fidelity-models");
    CorrectnessArray outcomes(static_cast<Eigen::Index>(n_models), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n_models; ++k) {
      const double lambda = uniform01(engine);
      for (std::size_t j = 0; j < n; ++j) {
        outcomes(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
            bench.solves(j, lambda) ? 1 : 0;
      }
    }
    const Eigen::ArrayXd full = outcomes.cast<double>().rowwise().mean();

    std::size_t cell = 0;
    for (const auto strategy : strategies) {
      for (const auto size : sizes) {
        std::vector<std::size_t> columns;
        if (size == n) {
          columns = all_columns;
        } else if (strategy == SubsetStrategy::Random) {
          columns = select_columns(calibration, strategy, size, seed);
        } else {
          columns = fixed.at({strategy, size});
        }
        Eigen::ArrayXd partial = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n_models));
        for (const auto j : columns) {
          partial += outcomes.col(static_cast<Eigen::Index>(j)).cast<double>();
        }
        partial /= static_cast<double>(columns.size());

        const bool full_constant = (full == full[0]).all();
        const bool partial_constant = (partial == partial[0]).all();
        double rho = 0.0;
        if (full_constant && partial_constant) {
          rho = 1.0;
        } else if (!full_constant && !partial_constant) {
          rho = spearman_rho(full, partial);
        }
        rows[s * cells + cell] = {strategy, size, seed, rho};
        ++cell;
      }
    }
  });
  return rows;
}

std::vector<FidelityMean> aggregate_fidelity(std::span<const FidelityRow> rows) {
  std::vector<FidelityMean> out;
  std::map<std::pair<SubsetStrategy, std::size_t>, std::size_t> slot;
  for (const auto& row : rows) {
    const auto [it, inserted] = slot.emplace(std::pair{row.strategy, row.size}, out.size());
    if (inserted) out.push_back({row.strategy, row.size, 0.0, 0});
    auto& mean = out[it->second];
    mean.mean_rho += row.rho;
    ++mean.seeds;
  }
  for (auto& mean : out) mean.mean_rho /= static_cast<double>(mean.seeds);
  return out;
}

}  // namespace evomerge
