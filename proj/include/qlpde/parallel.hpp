#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include "qlpde/types.hpp"

namespace qlpde {

/// Sets the OpenMP worker cap; values <= 0 leave the runtime default.
void set_thread_count(int threads);
int max_threads();

/// Runs body(i) for i in [0, count). Under ExecPolicy::parallel the loop is
/// an OpenMP static schedule; the first exception thrown by any iteration is
/// rethrown on the calling thread after the loop.
template <class Body>
void for_each_index(std::size_t count, ExecPolicy policy, Body&& body) {
    if (policy == ExecPolicy::serial) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qlpde
