// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "evomerge/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <fmt/core.h>
#include <json.hpp>

#include "evomerge/errors.hpp"
#include "evomerge/io_util.hpp"

namespace evomerge {

namespace {

constexpr char kMagic[4] = {'P', 'M', 'R', 'G'};
constexpr std::size_t kPrefixBytes = 8;  // magic + u32 header length
constexpr std::uint64_t kAlignment = 8;

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

std::uint64_t align_up(std::uint64_t n) { return (n + kAlignment - 1) / kAlignment * kAlignment; }

}  // namespace

Tensor::Tensor(std::vector<std::int64_t> shape_, Eigen::ArrayXf data_)
    : shape(std::move(shape_)), data(std::move(data_)) {}

std::int64_t Tensor::numel() const noexcept {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>());
}

std::int64_t Checkpoint::parameter_count() const noexcept {
  std::int64_t total = 0;
  for (const auto& [name, t] : tensors) total += t.data.size();
  return total;
}

void Checkpoint::validate_structure() const {
  if (tensors.empty()) throw Error("checkpoint must hold at least one tensor");
  for (const auto& [name, t] : tensors) {
    if (name.empty()) throw Error("tensor name must be non-empty");
    if (t.shape.empty()) throw Error(fmt::format("tensor '{}': shape must be non-empty", name));
    for (const auto d : t.shape) {
      if (d < 1) throw Error(fmt::format("tensor '{}': dimension {} is not positive", name, d));
    }
    if (t.numel() != t.data.size()) {
      throw Error(fmt::format("tensor '{}': shape holds {} elements but data has {}", name,
                              t.numel(), t.data.size()));
    }
  }
}

std::vector<char> encode_checkpoint(const Checkpoint& ckpt) {
  ckpt.validate_structure();

  nlohmann::json header;
  header["tensors"] = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : ckpt.tensors) {
    const std::uint64_t nbytes = static_cast<std::uint64_t>(t.data.size()) * sizeof(float);
    header["tensors"][name] = {{"shape", t.shape}, {"offset", offset}, {"nbytes", nbytes}};
    offset = align_up(offset + nbytes);
  }
  header["metadata"] = ckpt.metadata;
  const std::string text = header.dump();

  std::vector<char> out(kPrefixBytes + text.size() + offset, 0);
  std::memcpy(out.data(), kMagic, 4);
  const auto header_len = static_cast<std::uint32_t>(text.size());
  std::memcpy(out.data() + 4, &header_len, 4);
  std::memcpy(out.data() + kPrefixBytes, text.data(), text.size());

  char* payload = out.data() + kPrefixBytes + text.size();
  for (const auto& [name, t] : ckpt.tensors) {
    const auto off = header["tensors"][name]["offset"].get<std::uint64_t>();
    std::memcpy(payload + off, t.data.data(), static_cast<std::size_t>(t.data.size()) * sizeof(float));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::vector<char>& bytes, const LoadOptions& options) {
  if (bytes.size() < kPrefixBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error("bad magic: not a PMRG checkpoint container");
  }
  std::uint32_t header_len = 0;
  std::memcpy(&header_len, bytes.data() + 4, 4);
  if (bytes.size() < kPrefixBytes + header_len) {
    throw Error(fmt::format("truncated header: declares {} bytes, file holds {} after prefix",
                            header_len, bytes.size() - kPrefixBytes));
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + kPrefixBytes,
                                   bytes.begin() + kPrefixBytes + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("malformed header JSON: {}", e.what()));
  }
  if (!header.is_object() || !header.contains("tensors") || !header["tensors"].is_object()) {
    throw Error("header must be an object with a 'tensors' object");
  }
  if (header["tensors"].empty()) throw Error("container must hold at least one tensor");

  const std::size_t payload_start = kPrefixBytes + header_len;
  const std::uint64_t payload_size = bytes.size() - payload_start;

  Checkpoint ckpt;
  if (header.contains("metadata")) {
    for (const auto& [key, value] : header["metadata"].items()) {
      if (!value.is_string()) throw Error(fmt::format("metadata '{}' must be a string", key));
      ckpt.metadata[key] = value.get<std::string>();
    }
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  for (const auto& [name, entry] : header["tensors"].items()) {
    if (name.empty()) throw Error("tensor name must be non-empty");
    if (entry.contains("dtype") && entry["dtype"] != "f32") {
      throw Error(fmt::format("tensor '{}': unsupported dtype {}", name, entry["dtype"].dump()));
    }
    Tensor t;
    std::uint64_t offset = 0;
    std::uint64_t nbytes = 0;
    try {
      t.shape = entry.at("shape").get<std::vector<std::int64_t>>();
      offset = entry.at("offset").get<std::uint64_t>();
      nbytes = entry.at("nbytes").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(fmt::format("tensor '{}': bad header entry: {}", name, e.what()));
    }
    if (t.shape.empty()) throw Error(fmt::format("tensor '{}': shape must be non-empty", name));
    for (const auto d : t.shape) {
      if (d < 1) throw Error(fmt::format("tensor '{}': dimension {} is not positive", name, d));
    }
    const auto numel = static_cast<std::uint64_t>(t.numel());
    if (nbytes != numel * sizeof(float)) {
      throw Error(fmt::format("tensor '{}': header/offset mismatch, shape needs {} bytes but "
                              "nbytes is {}",
                              name, numel * sizeof(float), nbytes));
    }
    if (offset % kAlignment != 0) {
      throw Error(fmt::format("tensor '{}': offset {} is not {}-byte aligned", name, offset,
                              kAlignment));
    }
    if (offset > payload_size || nbytes > payload_size - offset) {
      throw Error(fmt::format("tensor '{}': truncated payload, needs bytes [{}, {}) at file "
                              "offset {} but payload holds {}",
                              name, offset, offset + nbytes, payload_start + offset, payload_size));
    }
    extents.emplace_back(offset, offset + nbytes);

    t.data.resize(static_cast<Eigen::Index>(numel));
    std::memcpy(t.data.data(), bytes.data() + payload_start + offset, nbytes);
    if (options.validate_finite) {
      for (Eigen::Index i = 0; i < t.data.size(); ++i) {
        if (!std::isfinite(t.data[i])) {
          throw Error(fmt::format("tensor '{}': non-finite element at byte offset {}", name,
                                  payload_start + offset + static_cast<std::uint64_t>(i) * 4));
        }
      }
    }
    ckpt.tensors.emplace(name, std::move(t));
  }

  std::sort(extents.begin(), extents.end());
  for (std::size_t i = 1; i < extents.size(); ++i) {
    if (extents[i].first < extents[i - 1].second) {
      throw Error(fmt::format("header/offset mismatch: tensor data overlaps at payload offset {}",
                              extents[i].first));
    }
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open checkpoint '{}'", path.string()));
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes, options);
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  write_file_atomic(path, std::string_view(bytes.data(), bytes.size()));
}

CompatibilityReport check_compatible(const Checkpoint& a, const Checkpoint& b) {
  CompatibilityReport report;
  for (const auto& [name, t] : a.tensors) {
    const auto it = b.tensors.find(name);
    if (it == b.tensors.end()) {
      report.missing.push_back(name);
    } else if (it->second.shape != t.shape) {
      report.shape_mismatch.push_back(name);
    }
  }
  for (const auto& [name, t] : b.tensors) {
    if (!a.tensors.contains(name)) report.extra.push_back(name);
  }
  return report;
}

}  // namespace evomerge
