// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "evomerge/errors.hpp"
#include "evomerge/evaluation.hpp"

namespace evomerge {

using CorrectnessArray = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// K calibration candidates (rows) × n items (columns).
struct CorrectnessMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> item_ids;
  CorrectnessArray correct;
  Eigen::ArrayXXd lengths;

  Eigen::Index models() const noexcept { return correct.rows(); }
  Eigen::Index items() const noexcept { return correct.cols(); }

  /// Throws InvalidArgument on size mismatches, non-binary entries, negative
  /// lengths, duplicate item ids or fewer than two models.
  void validate() const;

  std::size_t item_index(std::string_view item_id) const;
};

/// λ_k = k/(K − 1) for k = 0..K−1. Throws InvalidArgument when K < 2.
std::vector<double> uniform_lambda_grid(int k);

/// Row k holds the TA candidate at grid[k] evaluated on every item.
CorrectnessMatrix build_calibration_matrix(const Evaluator& evaluator, std::span<const double> grid,
                                           unsigned workers = 1);

double empirical_solve_rate(const CorrectnessMatrix& m, std::string_view item_id);

/// Column means of the correctness matrix.
Eigen::ArrayXd solve_rates(const CorrectnessMatrix& m);

/// −p log₂ p − (1 − p) log₂(1 − p), with 0·log 0 = 0.
template <typename Scalar>
  requires std::is_floating_point_v<Scalar>
Scalar bernoulli_entropy(Scalar p) {
  if (!(p >= Scalar(0) && p <= Scalar(1))) {
    throw InvalidArgument("bernoulli_entropy: p outside [0, 1]");
  }
  const auto term = [](Scalar x) { return x > Scalar(0) ? -x * std::log2(x) : Scalar(0); };
  return term(p) + term(Scalar(1) - p);
}

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> bernoulli_entropy(
    const Eigen::ArrayBase<Derived>& p) {
  Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> h(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) h[i] = bernoulli_entropy(p.derived()[i]);
  return h;
}

struct ItemStats {
  std::string item_id;
  double p = 0.0;
  double entropy = 0.0;
};

std::vector<ItemStats> item_stats(const CorrectnessMatrix& m);

enum class SubsetStrategy { Entropy, Random, Disagreement };

std::string_view to_string(SubsetStrategy strategy) noexcept;
/// "entropy", "random" or "disagreement".
SubsetStrategy parse_subset_strategy(std::string_view name);

struct EvaluationSubset {
  std::vector<std::string> item_ids;
  SubsetStrategy strategy = SubsetStrategy::Entropy;
  std::uint64_t seed = 0;

  friend bool operator==(const EvaluationSubset&, const EvaluationSubset&) = default;
};

/// ENTROPY: the `size` items of highest entropy, ties by ascending column.
/// RANDOM: uniform sample without replacement under `seed`.
/// DISAGREEMENT: the first `size` columns whose first and last rows differ.
/// Selected ids are returned in ascending column order.
EvaluationSubset select_subset(const CorrectnessMatrix& m, SubsetStrategy strategy,
                               std::size_t size, std::uint64_t seed);

/// 2t(1 − t): probability that a threshold item separates two candidates with
/// λ, λ′ drawn i.i.d. uniform on [0, 1].
inline double expected_distinction(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("expected_distinction: t outside [0, 1]");
  return 2.0 * t * (1.0 - t);
}

/// 1-based average ranks; tied values share the mean of their positions.
template <typename Derived>
Eigen::ArrayXd midranks(const Eigen::DenseBase<Derived>& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return x.derived()(a) < x.derived()(b); });
  Eigen::ArrayXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && x.derived()(order[j]) == x.derived()(order[i])) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (Eigen::Index k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

/// Spearman's ρ as the Pearson correlation of mid-ranks.
template <typename DerivedX, typename DerivedY>
double spearman_rho(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman_rho: length mismatch");
  if (x.size() < 2) throw InvalidArgument("spearman_rho: need at least two observations");
  const Eigen::ArrayXd rx = midranks(x);
  const Eigen::ArrayXd ry = midranks(y);
  const Eigen::ArrayXd dx = rx - rx.mean();
  const Eigen::ArrayXd dy = ry - ry.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx == 0.0 || syy == 0.0) throw InvalidArgument("spearman_rho: constant input");
  return std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  using Map = Eigen::Map<const Eigen::ArrayXd>;
  return spearman_rho(Map(x.data(), static_cast<Eigen::Index>(x.size())),
                      Map(y.data(), static_cast<Eigen::Index>(y.size())));
}

struct FidelityOptions {
  /// Calibration grid size used by ENTROPY and DISAGREEMENT selection.
  int calibration_models = 10;
  unsigned workers = 1;
};

struct FidelityRow {
  SubsetStrategy strategy;
  std::size_t size;
  std::uint64_t seed;
  double rho;
};

struct FidelityMean {
  SubsetStrategy strategy;
  std::size_t size;
  double mean_rho;
  std::size_t seeds;
};

/// For each seed, draws `n_models` λ values uniformly, ranks them by full
/// benchmark accuracy and by subset accuracy, and records Spearman's ρ for
/// every (strategy, size). A size equal to the item count uses the full set
/// for every strategy. When one ranking is constant ρ is 0, and 1 when both are.
std::vector<FidelityRow> rank_fidelity_curve(const SimulatedBenchmark& bench,
                                             std::span<const SubsetStrategy> strategies,
                                             std::span<const std::size_t> sizes,
                                             std::size_t n_models,
                                             std::span<const std::uint64_t> seeds,
                                             const FidelityOptions& options = {});

/// Per-(strategy, size) means, in first-appearance order.
std::vector<FidelityMean> aggregate_fidelity(std::span<const FidelityRow> rows);

}  // namespace evomerge
