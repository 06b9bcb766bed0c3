#include "lifsel/rng.hpp"

namespace lifsel {

std::uint64_t replicate_stream_key(std::uint64_t seed, std::uint64_t replicate) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (replicate + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t replicate)
    : engine_(replicate_stream_key(seed, replicate))
{}

void NoiseStream::fill(std::span<double> out)
{
    for (auto& v : out)
        v = normal_(engine_);
}

} // namespace lifsel
