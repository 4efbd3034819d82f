#pragma once

#include "scenclust/types.hpp"

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scenclust::detail {

inline int thread_count(Parallelism par) {
    if (par.threads > 0) return par.threads;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Keeps the exception raised by the lowest work item so parallel and
/// sequential runs report the same failure.
class FirstError {
public:
    void capture(long long item) {
        std::lock_guard lock(mutex_);
        if (!error_ || item < item_) {
            error_ = std::current_exception();
            item_ = item;
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
    long long item_ = 0;
};

}  // namespace scenclust::detail
