#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace idma {

/// Mixes (seed, index) into an engine seed; replicate r of a run always gets
/// the same stream regardless of which worker draws it.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// A random stream owned by exactly one caller. Satisfies
/// UniformRandomBitGenerator so it can drive <random> distributions.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed, std::uint64_t index = 0)
        : engine_(derive_stream_seed(seed, index)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    result_type operator()() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Poisson count with the given mean.
    std::uint64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

} // namespace idma
