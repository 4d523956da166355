// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace evomerge {

/// Dense f32 tensor stored flat in row-major order.
struct Tensor {
  std::vector<std::int64_t> shape;
  Eigen::ArrayXf data;

  Tensor() = default;
  Tensor(std::vector<std::int64_t> shape_, Eigen::ArrayXf data_);

  /// Product of the shape; 0 for an empty shape.
  std::int64_t numel() const noexcept;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape == b.shape && a.data.size() == b.data.size() && (a.data == b.data).all();
  }
};

/// One model's parameters, keyed and iterated in tensor-name order.
struct Checkpoint {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> metadata;

  std::int64_t parameter_count() const noexcept;

  /// Throws Error when a name is empty, a shape is empty or non-positive, or
  /// the data length disagrees with the shape.
  void validate_structure() const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct LoadOptions {
  /// Reject NaN/Inf elements.
  bool validate_finite = true;
};

/// Reads a `PMRG` container. Errors name the offending tensor and byte offset.
Checkpoint load_checkpoint(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes a `PMRG` container; existing files are replaced.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

/// Serialized container bytes; `save_checkpoint` writes exactly these.
std::vector<char> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<char>& bytes, const LoadOptions& options = {});

struct CompatibilityReport {
  /// Names present in the first checkpoint only.
  std::vector<std::string> missing;
  /// Names present in the second checkpoint only.
  std::vector<std::string> extra;
  /// Names present in both with different shapes.
  std::vector<std::string> shape_mismatch;

  bool compatible() const noexcept {
    return missing.empty() && extra.empty() && shape_mismatch.empty();
  }
};

CompatibilityReport check_compatible(const Checkpoint& a, const Checkpoint& b);

}  // namespace evomerge
