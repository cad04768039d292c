#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams.  Every (seed, stream index) pair yields an
// independent deterministic sequence, so a Monte Carlo sample or a trajectory
// can be recomputed in isolation and parallel runs are bit-identical to
// serial ones by construction.

namespace qrcsl {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic scalar stream for one (seed, index) pair.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t index)
        : state_(detail::mix64(detail::mix64(seed) ^
                               (0x9E3779B97F4A7C15ull * (index + 1))))
    {}

    std::uint64_t next_u64()
    {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; draws come in cached pairs.
    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qrcsl
