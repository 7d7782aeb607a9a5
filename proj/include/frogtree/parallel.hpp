//------------------------------- -*- C++ -*- -------------------------------//
// Copyright frogtree contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file frogtree/parallel.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace frogtree
{
//! Worker count to use for a requested count (0 = hardware concurrency).
inline unsigned resolve_threads(unsigned requested) noexcept
{
    if (requested > 0)
    {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

//---------------------------------------------------------------------------//
/*!
 * Run `body(worker, index)` for index in [0, count) on a pool of workers.
 *
 * Indices are handed out dynamically, so `body` must only write to
 * index-addressed output (or worker-private scratch) for results to be
 * independent of the thread count. The first exception thrown by any worker
 * is rethrown on the calling thread.
 */
template<class Body>
void parallel_for(std::int64_t count, unsigned threads, Body&& body)
{
    unsigned const workers = static_cast<unsigned>(
        std::min<std::int64_t>(resolve_threads(threads),
                               std::max<std::int64_t>(count, 1)));
    if (workers <= 1)
    {
        for (std::int64_t i = 0; i < count; ++i)
        {
            body(0u, i);
        }
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&](unsigned worker) {
        try
        {
            for (std::int64_t i = next++; i < count; i = next++)
            {
                body(worker, i);
            }
        }
        catch (...)
        {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure)
            {
                failure = std::current_exception();
            }
            next = count;
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w)
    {
        pool.emplace_back(run, w);
    }
    run(0);
    for (auto& t : pool)
    {
        t.join();
    }
    if (failure)
    {
        std::rethrow_exception(failure);
    }
}

}  // namespace frogtree
