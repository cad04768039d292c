#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <span>
#include <thread>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/numerics/rng.hpp"

// Monte Carlo expectation against a product standard-normal measure.
// Samples are indexed, each drawn from its own counter-based stream, and the
// reduction runs over fixed-size chunks combined in chunk order, so the
// result is bit-identical for any worker count.

namespace qrcsl {

struct MCEstimate {
    double mean;
    double std_error;
    std::uint64_t n_samples;
    std::uint64_t seed;
};

namespace detail {

inline int worker_count()
{
    // QRCSL_WORKERS caps the thread count; default is the hardware count.
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("QRCSL_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v < 1024) n = static_cast<unsigned>(v);
    }
    return static_cast<int>(n);
}

struct ChunkSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

} // namespace detail

/// Mean and standard error of f(x) with x ~ N(0, 1)^dim, using n_samples
/// points from the (seed, sample index) streams.
template <typename F>
MCEstimate mc_integrate_gaussian(int dim, F&& f, std::uint64_t n_samples, std::uint64_t seed)
{
    if (dim < 1)
        throw config_error("mc_integrate_gaussian: dimension must be >= 1");
    if (n_samples < 2)
        throw config_error("mc_integrate_gaussian: need at least 2 samples");

    constexpr std::uint64_t chunk = 4096;
    const std::uint64_t n_chunks = (n_samples + chunk - 1) / chunk;
    std::vector<detail::ChunkSums> partials(n_chunks);

    auto run_block = [&](std::uint64_t c_begin, std::uint64_t c_end) {
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (std::uint64_t c = c_begin; c < c_end; ++c) {
            const std::uint64_t lo = c * chunk;
            const std::uint64_t hi = std::min(lo + chunk, n_samples);
            detail::ChunkSums s;
            for (std::uint64_t i = lo; i < hi; ++i) {
                SampleStream stream(seed, i);
                for (int d = 0; d < dim; ++d) x[static_cast<std::size_t>(d)] = stream.normal();
                const double v = f(std::span<const double>(x));
                s.sum += v;
                s.sum_sq += v * v;
            }
            partials[c] = s;
        }
    };

    const int workers = std::min<std::uint64_t>(detail::worker_count(), n_chunks);
    if (workers <= 1) {
        run_block(0, n_chunks);
    } else {
        std::vector<std::future<void>> tasks;
        const std::uint64_t per = (n_chunks + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t b = static_cast<std::uint64_t>(w) * per;
            const std::uint64_t e = std::min(b + per, n_chunks);
            if (b >= e) break;
            tasks.push_back(std::async(std::launch::async, run_block, b, e));
        }
        for (auto& t : tasks) t.get();
    }

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : partials) {
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    double var = (sum_sq - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / n), n_samples, seed};
}

} // namespace qrcsl
