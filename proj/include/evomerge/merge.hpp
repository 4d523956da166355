// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "evomerge/checkpoint.hpp"

namespace evomerge {

enum class MergeKind { TA, TIES, LINEAR };

std::string_view to_string(MergeKind kind) noexcept;
/// Accepts "ta", "ties", "linear" in any case.
MergeKind parse_merge_kind(std::string_view name);

/// Number of decision variables for each operator: TA [λ], TIES [λ, k],
/// LINEAR [ω_S2, ω_S1].
std::size_t genotype_size(MergeKind kind) noexcept;

struct Genotype {
  MergeKind kind = MergeKind::TA;
  std::vector<double> values;

  friend bool operator==(const Genotype&, const Genotype&) = default;
};

/// Box for each LINEAR weight.
struct LinearBounds {
  double low = 0.0;
  double high = 1.5;
};

/// Throws InvalidArgument unless `g` satisfies its operator's bounds.
void validate_genotype(const Genotype& g, const LinearBounds& linear = {});

/// Stable identifier such as "ta:0.25" or "linear:0.5,0.75" (shortest
/// round-trip decimal per value). Used to match external evaluation records.
std::string candidate_id(const Genotype& g);

/// The two merge endpoints. Holds references; both checkpoints must outlive it.
class MergeEndpoints {
 public:
  /// Throws Error when the endpoints are not architecturally compatible.
  MergeEndpoints(const Checkpoint& system2, const Checkpoint& system1);

  const Checkpoint& system2() const noexcept { return *system2_; }
  const Checkpoint& system1() const noexcept { return *system1_; }

 private:
  const Checkpoint* system2_;
  const Checkpoint* system1_;
};

// ---------------------------------------------------------------------------
// Elementwise kernels. Evaluation order is fixed so that results are
// bit-reproducible; callers must not rearrange these expressions.

/// (1 − λ)·s2 + λ·s1. Exact at λ ∈ {0, 1} for finite inputs.
template <typename DerivedS2, typename DerivedS1>
auto interpolate(const Eigen::ArrayBase<DerivedS2>& s2, const Eigen::ArrayBase<DerivedS1>& s1,
                 typename DerivedS2::Scalar lambda) {
  using Scalar = typename DerivedS2::Scalar;
  return (Scalar(1) - lambda) * s2.derived() + lambda * s1.derived();
}

/// ω_S2·s2 + ω_S1·s1.
template <typename DerivedS2, typename DerivedS1>
auto weighted_sum(const Eigen::ArrayBase<DerivedS2>& s2, const Eigen::ArrayBase<DerivedS1>& s1,
                  typename DerivedS2::Scalar w2, typename DerivedS2::Scalar w1) {
  return w2 * s2.derived() + w1 * s1.derived();
}

/// Number of entries kept when retaining a fraction `density` of `n`: ⌈density·n⌉,
/// with products within rounding noise of an integer treated as that integer.
inline Eigen::Index retained_count(double density, Eigen::Index n) {
  const double exact = density * static_cast<double>(n);
  const double nearest = std::round(exact);
  const double count = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest
                                                                                : std::ceil(exact);
  return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(count), 1, n);
}

/// Mask of the ⌈density·n⌉ largest-magnitude entries. Equal magnitudes keep the
/// lower flat index first.
template <typename Derived>
Eigen::Array<bool, Eigen::Dynamic, 1> top_magnitude_mask(const Eigen::ArrayBase<Derived>& values,
                                                         double density) {
  const Eigen::Index n = values.size();
  Eigen::Array<bool, Eigen::Dynamic, 1> mask = Eigen::Array<bool, Eigen::Dynamic, 1>::Zero(n);
  if (n == 0) return mask;
  const Eigen::Index keep = retained_count(density, n);
  if (keep == n) return mask.setConstant(true);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto by_magnitude = [&](Eigen::Index a, Eigen::Index b) {
    const auto ma = std::abs(values.derived()[a]);
    const auto mb = std::abs(values.derived()[b]);
    return ma > mb || (ma == mb && a < b);
  };
  std::nth_element(order.begin(), order.begin() + keep, order.end(), by_magnitude);
  for (Eigen::Index i = 0; i < keep; ++i) mask[order[static_cast<std::size_t>(i)]] = true;
  return mask;
}

// ---------------------------------------------------------------------------
// Checkpoint-level operators.

/// τ = θ_S1 − θ_S2 per tensor.
Checkpoint compute_displacement(const MergeEndpoints& endpoints);

/// (1 − λ)·θ_S2 + λ·θ_S1 per tensor.
Checkpoint merge_task_arithmetic(const MergeEndpoints& endpoints, double lambda);

/// θ_S2 + λ·τ_trimmed, where τ_trimmed keeps the ⌈k·n⌉ largest-magnitude
/// entries of each tensor's displacement.
Checkpoint merge_ties(const MergeEndpoints& endpoints, double lambda, double density);

Checkpoint merge_linear(const MergeEndpoints& endpoints, double w_system2, double w_system1,
                        const LinearBounds& bounds = {});

Checkpoint decode_genotype(const Genotype& g, const MergeEndpoints& endpoints,
                           const LinearBounds& bounds = {});

}  // namespace evomerge
