/*
 * Copyright (c) 2026, The rollfit Authors. All rights reserved.
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

#include <cstddef>
#include <functional>
#include <vector>

namespace rollfit {

// Worker count: ROLLFIT_THREADS when set to a positive integer, otherwise
// the hardware concurrency. Read on every call.
unsigned thread_count();

// Runs body(i) for i in [0, n). Iterations must write disjoint state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Splits [0, n) into fixed-size blocks that do not depend on the thread
// count, evaluates block(begin, end) for each, and folds the results in
// block order. Output is bit-identical for any number of workers.
template <typename T, typename Block, typename Combine>
T ordered_reduce(std::size_t n, std::size_t block_size, T init, Block block,
                 Combine combine) {
  const std::size_t blocks = (n + block_size - 1) / block_size;
  std::vector<T> partial(blocks, init);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    const std::size_t end = begin + block_size < n ? begin + block_size : n;
    partial[b] = block(begin, end);
  });
  T acc = init;
  for (const auto& p : partial) acc = combine(acc, p);
  return acc;
}

}  // namespace rollfit
