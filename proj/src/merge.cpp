// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/merge.hpp"

#include <cctype>

#include <fmt/core.h>
#include <fmt/format.h>

#include "evomerge/errors.hpp"

namespace evomerge {

std::string_view to_string(MergeKind kind) noexcept {
  switch (kind) {
    case MergeKind::TA: return "ta";
    case MergeKind::TIES: return "ties";
    case MergeKind::LINEAR: return "linear";
  }
  return "?";
}

MergeKind parse_merge_kind(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "ta") return MergeKind::TA;
  if (lower == "ties") return MergeKind::TIES;
  if (lower == "linear") return MergeKind::LINEAR;
  throw InvalidArgument(fmt::format("unknown merge operator '{}' (expected ta|ties|linear)", name));
}

std::size_t genotype_size(MergeKind kind) noexcept {
  return kind == MergeKind::TA ? 1 : 2;
}

void validate_genotype(const Genotype& g, const LinearBounds& linear) {
  if (g.values.size() != genotype_size(g.kind)) {
    throw InvalidArgument(fmt::format("{} genotype needs {} value(s), got {}", to_string(g.kind),
                                      genotype_size(g.kind), g.values.size()));
  }
  for (const double v : g.values) {
    if (!std::isfinite(v)) throw InvalidArgument("genotype values must be finite");
  }
  switch (g.kind) {
    case MergeKind::TA:
    case MergeKind::TIES:
      if (g.values[0] < 0.0 || g.values[0] > 1.0) {
        throw InvalidArgument(fmt::format("lambda {} outside [0, 1]", g.values[0]));
      }
      if (g.kind == MergeKind::TIES && (g.values[1] <= 0.0 || g.values[1] > 1.0)) {
        throw InvalidArgument(fmt::format("density k {} outside (0, 1]", g.values[1]));
      }
      break;
    case MergeKind::LINEAR:
      for (const double w : g.values) {
        if (w < linear.low || w > linear.high) {
          throw InvalidArgument(
              fmt::format("linear weight {} outside [{}, {}]", w, linear.low, linear.high));
        }
      }
      break;
  }
}

std::string candidate_id(const Genotype& g) {
  return fmt::format("{}:{}", to_string(g.kind), fmt::join(g.values, ","));
}

MergeEndpoints::MergeEndpoints(const Checkpoint& system2, const Checkpoint& system1)
    : system2_(&system2), system1_(&system1) {
  const auto report = check_compatible(system2, system1);
  if (!report.compatible()) {
    throw Error(fmt::format(
        "endpoints are not compatible: missing in system1 [{}], missing in system2 [{}], "
        "shape mismatch [{}]",
        fmt::join(report.missing, ", "), fmt::join(report.extra, ", "),
        fmt::join(report.shape_mismatch, ", ")));
  }
}

namespace {

/// Applies `kernel(s2, s1)` to each tensor pair, carrying over system2's
/// metadata.
template <typename Kernel>
Checkpoint map_tensors(const MergeEndpoints& endpoints, Kernel&& kernel) {
  Checkpoint out;
  out.metadata = endpoints.system2().metadata;
  for (const auto& [name, s2] : endpoints.system2().tensors) {
    const Tensor& s1 = endpoints.system1().tensors.at(name);
    out.tensors.emplace(name, Tensor(s2.shape, kernel(s2.data, s1.data)));
  }
  return out;
}

}  // namespace

Checkpoint compute_displacement(const MergeEndpoints& endpoints) {
  return map_tensors(endpoints, [](const Eigen::ArrayXf& s2, const Eigen::ArrayXf& s1) {
    return Eigen::ArrayXf(s1 - s2);
  });
}

Checkpoint merge_task_arithmetic(const MergeEndpoints& endpoints, double lambda) {
  validate_genotype({MergeKind::TA, {lambda}});
  const auto lam = static_cast<float>(lambda);
  auto out = map_tensors(endpoints, [lam](const Eigen::ArrayXf& s2, const Eigen::ArrayXf& s1) {
    return Eigen::ArrayXf(interpolate(s2, s1, lam));
  });
  out.metadata["merge"] = candidate_id({MergeKind::TA, {lambda}});
  return out;
}

Checkpoint merge_ties(const MergeEndpoints& endpoints, double lambda, double density) {
  validate_genotype({MergeKind::TIES, {lambda, density}});
  const auto lam = static_cast<float>(lambda);
  // Retained entries in interpolation form, trimmed entries stay at θ_S2.
  auto out = map_tensors(endpoints, [&](const Eigen::ArrayXf& s2, const Eigen::ArrayXf& s1) {
    const Eigen::ArrayXf tau = s1 - s2;
    const auto keep = top_magnitude_mask(tau, density);
    return Eigen::ArrayXf(keep.select(interpolate(s2, s1, lam), s2));
  });
  out.metadata["merge"] = candidate_id({MergeKind::TIES, {lambda, density}});
  return out;
}

Checkpoint merge_linear(const MergeEndpoints& endpoints, double w_system2, double w_system1,
                        const LinearBounds& bounds) {
  validate_genotype({MergeKind::LINEAR, {w_system2, w_system1}}, bounds);
  const auto w2 = static_cast<float>(w_system2);
  const auto w1 = static_cast<float>(w_system1);
  auto out = map_tensors(endpoints, [=](const Eigen::ArrayXf& s2, const Eigen::ArrayXf& s1) {
    return Eigen::ArrayXf(weighted_sum(s2, s1, w2, w1));
  });
  out.metadata["merge"] = candidate_id({MergeKind::LINEAR, {w_system2, w_system1}});
  return out;
}

Checkpoint decode_genotype(const Genotype& g, const MergeEndpoints& endpoints,
                           const LinearBounds& bounds) {
  validate_genotype(g, bounds);
  switch (g.kind) {
    case MergeKind::TA: return merge_task_arithmetic(endpoints, g.values[0]);
    case MergeKind::TIES: return merge_ties(endpoints, g.values[0], g.values[1]);
    case MergeKind::LINEAR: return merge_linear(endpoints, g.values[0], g.values[1], bounds);
  }
  throw InvalidArgument("unknown merge kind");
}

}  // namespace evomerge
