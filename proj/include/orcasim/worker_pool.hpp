/*
 * Copyright (c) 2026 The orcasim Authors.
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
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace orcasim {

/// Fixed set of workers draining a shared queue of task indices.
///
/// `parallel_for(n, fn)` runs fn(0..n-1), each index exactly once, and
/// returns when all have finished. The calling thread participates, so a
/// pool of `worker_count` runs `worker_count - 1` background threads. Tasks
/// are claimed front-first through an atomic cursor; which worker runs which
/// task is unspecified, so tasks must write only to their own outputs.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t worker_count);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t worker_count() const noexcept { return threads_.size() + 1; }

  /// Rethrows the exception of the lowest-indexed failing task, if any.
  void parallel_for(std::size_t task_count, const std::function<void(std::size_t)>& task);

 private:
  void worker_loop(std::stop_token stop);
  void drain(const std::function<void(std::size_t)>& task, std::size_t count);

  std::vector<std::jthread> threads_;
  std::mutex mutex_;
  std::condition_variable_any wake_;
  std::condition_variable done_;

  // Current job; guarded by mutex_ except for the atomics.
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t task_count_ = 0;
  std::uint64_t generation_ = 0;
  std::size_t busy_ = 0;
  std::atomic<std::size_t> next_{0};

  std::mutex error_mutex_;
  std::size_t error_index_ = 0;
  std::exception_ptr error_;
};

}  // namespace orcasim
