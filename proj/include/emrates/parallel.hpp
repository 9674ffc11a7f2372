/*
 * Copyright 2026 The emrates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace emrates {

/// Worker count for replica loops; 0 means hardware concurrency. Never
/// affects numerical output: per-replica results are stored by index and
/// reduced in index order.
struct Execution {
  unsigned workers = 0;

  unsigned resolved() const {
    if (workers != 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Calls fn(i) for i in [0, count) across the worker pool. If calls throw,
/// workers stop picking up new batches and the exception with the smallest
/// replica index among those raised is rethrown.
template <class Fn>
void for_each_replica(std::int64_t count, const Execution& exec, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(exec.resolved(), std::max<std::int64_t>(count, 1)));
  constexpr std::int64_t kBatch = 64;
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::int64_t error_index = std::numeric_limits<std::int64_t>::max();

  auto body = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::int64_t begin = next.fetch_add(kBatch);
      if (begin >= count) return;
      const std::int64_t end = std::min(count, begin + kBatch);
      for (std::int64_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
          stop.store(true);
          return;
        }
      }
    }
  };

  if (workers <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace emrates
