#ifndef PSSEQ_PARALLEL_HPP
#define PSSEQ_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iterator>
#include <thread>
#include <vector>

namespace psseq {

// Splits [begin, end) into `workers` contiguous chunks and runs
// fn(chunk_index, lo, hi) on each, one thread per chunk. Results written by
// chunk index are merged by the caller in chunk order, so output never
// depends on scheduling. The first exception thrown by any chunk is
// rethrown after all threads have joined.
template <class F>
void parallel_chunks(std::int64_t begin, std::int64_t end, unsigned workers, F &&fn)
{
    const std::int64_t total = end > begin ? end - begin : 0;
    const auto chunks = static_cast<std::int64_t>(std::max(1U, workers));
    if (chunks == 1 || total < 2 * chunks) {
        fn(std::size_t{0}, begin, end);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(chunks));
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::int64_t lo = begin + total * c / chunks;
        const std::int64_t hi = begin + total * (c + 1) / chunks;
        threads.emplace_back([&, c, lo, hi] {
            try {
                fn(static_cast<std::size_t>(c), lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(c)] = std::current_exception();
            }
        });
    }
    for (auto &t : threads) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

// Number of chunks parallel_chunks will actually use.
inline std::size_t chunk_count(std::int64_t begin, std::int64_t end, unsigned workers)
{
    const std::int64_t total = end > begin ? end - begin : 0;
    const auto chunks = static_cast<std::int64_t>(std::max(1U, workers));
    return (chunks == 1 || total < 2 * chunks) ? 1 : static_cast<std::size_t>(chunks);
}

// Concatenates per-chunk vectors in chunk order.
template <class T>
std::vector<T> concat_chunks(std::vector<std::vector<T>> parts)
{
    std::size_t n = 0;
    for (const auto &p : parts) {
        n += p.size();
    }
    std::vector<T> out;
    out.reserve(n);
    for (auto &p : parts) {
        std::move(p.begin(), p.end(), std::back_inserter(out));
    }
    return out;
}

} // namespace psseq

#endif
