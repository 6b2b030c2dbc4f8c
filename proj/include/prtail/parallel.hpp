#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace prtail::detail {

/// Runs body(block) for block in [0, num_blocks). Blocks are dealt round-robin to workers,
/// so any per-block result is independent of the worker count.
template <typename Body>
void for_each_block(std::size_t num_blocks, unsigned threads, Body&& body) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), num_blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < num_blocks; ++b) body(b);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t b = w; b < num_blocks; b += workers) body(b);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace prtail::detail
