#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vandermonde {

namespace detail {

inline std::atomic<int>& thread_setting() {
    static std::atomic<int> value{0};
    return value;
}

} // namespace detail

/// Environment variable consulted when no explicit thread cap is set.
inline constexpr const char* threads_env_var = "VANDERMONDE_THREADS";

/// Caps worker threads for parallel_for; 0 restores the default.
inline void set_max_threads(int n) { detail::thread_setting().store(std::max(0, n)); }

inline int max_threads() {
    const int explicit_value = detail::thread_setting().load();
    if (explicit_value > 0) return explicit_value;
    if (const char* env = std::getenv(threads_env_var)) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so the
/// result does not depend on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(max_threads()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace vandermonde
