/*
   Copyright 2026 The she-lattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace she {

/// Worker count used when a caller passes 0.
unsigned default_threads() noexcept;

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers and returns
/// the results in index order, so any later reduction is independent of the
/// thread count. If several calls throw, the lowest index wins.
template <class F>
auto parallel_map(std::size_t n, unsigned threads, F&& fn)
    -> std::vector<std::invoke_result_t<F&, std::uint32_t>>
{
    using R = std::invoke_result_t<F&, std::uint32_t>;
    std::vector<R> out(n);
    if (threads == 0) {
        threads = default_threads();
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(static_cast<std::uint32_t>(i));
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::mutex guard;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(static_cast<std::uint32_t>(i));
            } catch (...) {
                std::lock_guard lock(guard);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

} // namespace she
