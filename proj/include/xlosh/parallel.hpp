#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "xlosh/common.hpp"

namespace xlosh {

// Fixed block size for point-set partitioning. The reduction tree below is
// built over block sums only, so results are identical for any worker count.
inline constexpr std::int64_t reduction_block_size = 65536;

inline std::int64_t block_count(std::int64_t n) {
    return (n + reduction_block_size - 1) / reduction_block_size;
}

// Pairwise tree combine; shape depends only on the number of entries.
template <typename T>
inline T pairwise_combine(std::vector<T> v) {
    if (v.empty()) return T{};
    while (v.size() > 1) {
        std::size_t half = v.size() / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (v.size() % 2) v[half] = v.back();
        v.resize(half + v.size() % 2);
    }
    return v[0];
}

// Runs fn(block_index) over [0, nblocks) on up to thread_count() workers.
// fn must write only to its own block's slots.
inline void parallel_blocks(std::int64_t nblocks, const std::function<void(std::int64_t)>& fn) {
    unsigned workers = std::min<std::uint64_t>(thread_count(), std::uint64_t(nblocks));
    if (workers <= 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t b = next.fetch_add(1);
                if (b >= nblocks || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(b);
                } catch (...) {
                    std::lock_guard lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace xlosh
