// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace evomerge {

/// Calls `body(i)` for i in [0, n) on up to `workers` threads. Results must be
/// written by index. If any call throws, the exception of the lowest failing
/// index is rethrown after all workers finish; `completed_before` receives
/// that index (n when everything succeeded).
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body,
                  std::size_t* completed_before = nullptr) {
  std::vector<std::exception_ptr> errors(n);
  const auto run_one = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run_one(i);
      });
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      if (completed_before) *completed_before = i;
      std::rethrow_exception(errors[i]);
    }
  }
  if (completed_before) *completed_before = n;
}

}  // namespace evomerge
