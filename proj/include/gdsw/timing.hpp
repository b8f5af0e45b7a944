#pragma once

#include <atomic>
#include <chrono>

namespace gdsw {

/// Monotonic wall-clock stopwatch.
class WallTimer {
public:
    WallTimer() : start_(clock::now()) {}

    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

    void reset() { start_ = clock::now(); }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_;
};

/// Thread-safe accumulator of elapsed seconds, stored as nanoseconds.
class TimeAccumulator {
public:
    TimeAccumulator() : nanos_(0) {}
    TimeAccumulator(const TimeAccumulator& other)
        : nanos_(other.nanos_.load(std::memory_order_relaxed)) {}
    TimeAccumulator& operator=(const TimeAccumulator& other) {
        nanos_.store(other.nanos_.load(std::memory_order_relaxed),
                     std::memory_order_relaxed);
        return *this;
    }

    void add_seconds(double s) {
        nanos_.fetch_add(static_cast<long long>(s * 1e9),
                         std::memory_order_relaxed);
    }

    double seconds() const {
        return static_cast<double>(nanos_.load(std::memory_order_relaxed)) * 1e-9;
    }

private:
    std::atomic<long long> nanos_;
};

} // namespace gdsw
