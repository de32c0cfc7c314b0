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

#include "orcasim/worker_pool.hpp"

#include <algorithm>
#include <utility>

namespace orcasim {

WorkerPool::WorkerPool(std::size_t worker_count) {
  const std::size_t extra = std::max<std::size_t>(worker_count, 1) - 1;
  threads_.reserve(extra);
  for (std::size_t i = 0; i < extra; ++i) {
    threads_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
  }
}

WorkerPool::~WorkerPool() {
  for (auto& t : threads_) t.request_stop();
  wake_.notify_all();
  // jthread joins on destruction
}

void WorkerPool::drain(const std::function<void(std::size_t)>& task, std::size_t count) {
  for (;;) {
    const std::size_t i = next_.fetch_add(1, std::memory_order_relaxed);
    if (i >= count) return;
    try {
      task(i);
    } catch (...) {
      std::lock_guard lock(error_mutex_);
      if (!error_ || i < error_index_) {
        error_ = std::current_exception();
        error_index_ = i;
      }
    }
  }
}

void WorkerPool::worker_loop(std::stop_token stop) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t)>* task = nullptr;
    std::size_t count = 0;
    {
      std::unique_lock lock(mutex_);
      if (!wake_.wait(lock, stop, [&] { return generation_ != seen; })) return;
      seen = generation_;
      task = task_;
      count = task_count_;
      ++busy_;
    }
    drain(*task, count);
    {
      std::lock_guard lock(mutex_);
      --busy_;
    }
    done_.notify_one();
  }
}

void WorkerPool::parallel_for(std::size_t task_count, const std::function<void(std::size_t)>& task) {
  if (task_count == 0) return;
  error_ = nullptr;
  if (threads_.empty() || task_count == 1) {
    for (std::size_t i = 0; i < task_count; ++i) task(i);
    return;
  }
  {
    std::unique_lock lock(mutex_);
    // A worker that woke late for the previous job may still hold it.
    done_.wait(lock, [&] { return busy_ == 0; });
    task_ = &task;
    task_count_ = task_count;
    next_.store(0, std::memory_order_relaxed);
    ++generation_;
  }
  wake_.notify_all();
  drain(task, task_count);
  {
    std::unique_lock lock(mutex_);
    done_.wait(lock, [&] { return busy_ == 0; });
  }
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

}  // namespace orcasim
