#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace twrn {

// Reproducible random substreams.  A stream is identified by a master seed
// plus a path of integers (sweep point, frame index, ...); the key is mixed
// through SplitMix64 so sibling streams are decorrelated and the mapping
// (seed, path) -> stream is independent of scheduling or thread count.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : engine_(key) {}

    static std::uint64_t mix_key(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path);

    static RngStream substream(std::uint64_t seed,
                               std::initializer_list<std::uint64_t> path) {
        return RngStream(mix_key(seed, path));
    }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0,1) with 53-bit resolution
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer on [0, bound); bound > 0
    std::uint64_t uniform_int(std::uint64_t bound) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((u128(next_u64()) * u128(bound)) >> 64);
    }

    // circularly-symmetric complex Gaussian, E|z|^2 = variance
    std::complex<double> complex_gaussian(double variance);

    // real N(0, variance)
    double gaussian(double variance);

private:
    std::mt19937_64 engine_;
};

}  // namespace twrn
