#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace lifsel {

//! Seed of the engine used for one replicate. The master seed is offset by
//! (replicate + 1) golden-ratio increments and passed through the splitmix64
//! finalizer, so neighbouring replicates get unrelated engine states.
std::uint64_t replicate_stream_key(std::uint64_t seed, std::uint64_t replicate) noexcept;

//! Standard normal draws for a single (seed, replicate) pair.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t replicate);

    double standard_normal() { return normal_(engine_); }
    void fill(std::span<double> out);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace lifsel
