#include "twrn/rng.hpp"

#include <cmath>
#include <numbers>

namespace twrn {

namespace {

// SplitMix64 step (Steele/Lea/Flood); also a good 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::mix_key(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = seed;
    std::uint64_t key = splitmix64(state);
    for (std::uint64_t component : path) {
        state ^= component + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        key = splitmix64(state);
    }
    return key;
}

std::complex<double> RngStream::complex_gaussian(double variance) {
    // polar Box-Muller; 1-u keeps the log argument in (0,1]
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-variance * std::log1p(-u1));
    double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

double RngStream::gaussian(double variance) {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * variance * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace twrn
