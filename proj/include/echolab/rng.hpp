#pragma once

#include <cstdint>

namespace echolab {

/// SplitMix64 finalizer: a bijective 64-bit mixer with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t seed_combine(std::uint64_t h) { return h; }

/// Fold any number of 64-bit words into a single well-mixed seed.
/// Used everywhere a derived stream is needed (per sweep cell, per
/// realization, per ensemble point) so that results never depend on
/// evaluation order or thread layout.
template <typename... Rest>
std::uint64_t seed_combine(std::uint64_t h, std::uint64_t v, Rest... rest) {
    h = mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
    return seed_combine(h, rest...);
}

/// Map 64 random bits to a double strictly inside (0, 1).
inline double unit_from_bits(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Sequential SplitMix64 stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1); never returns an exact endpoint.
    double next_unit() { return unit_from_bits(next()); }

    /// Uniform integer in [0, n) via multiply-shift (no modulo bias to
    /// speak of for the small n used here, and fully deterministic).
    int next_below(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Counter-based uniform draw: the value depends only on (seed, counter),
/// never on how many draws preceded it.
inline double unit_at(std::uint64_t seed, std::uint64_t counter) {
    return unit_from_bits(mix64(seed_combine(seed, counter)));
}

}  // namespace echolab
