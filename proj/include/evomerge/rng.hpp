// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evomerge {

using Engine = std::mt19937_64;

/// 64-bit FNV-1a; stable across platforms, used to key streams by name.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent stream keyed by (seed, tag, a, b). Two calls with the same key
/// always produce the same sequence, so stochastic decisions never depend on
/// the order in which workers run.
inline Engine substream(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0,
                        std::uint64_t b = 0) {
  const std::uint64_t tag_hash = fnv1a64(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag_hash), static_cast<std::uint32_t>(tag_hash >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

/// Uniform draw on [0, 1).
inline double uniform01(Engine& engine) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine);
}

inline double uniform(Engine& engine, double low, double high) {
  return std::uniform_real_distribution<double>(low, high)(engine);
}

}  // namespace evomerge
