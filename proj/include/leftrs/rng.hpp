#ifndef LEFTRS_RNG_HPP
#define LEFTRS_RNG_HPP

#include <cstdint>

namespace leftrs {

// SplitMix64: seedable, portable, and fast enough for everything we draw.
//
// Stream-splitting rule: child(tag) derives an independent stream from the
// stream's ORIGIN seed and the tag only -- never from the evolving state --
// so the set of children is fixed at construction time. Generators hand one
// child per concern (and one per task index), which means adding a new draw
// to one concern never perturbs the sequences of any other.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) // full 64-bit range
            return static_cast<std::int64_t>(next_u64());
        // multiply-shift: tiny bias, byte-identical on every platform
        unsigned __int128 m =
            static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<std::int64_t>(m >> 64);
    }

    Rng child(std::uint64_t tag) const {
        std::uint64_t z = seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 0x632be59bd9b4e019ULL));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

// seed = mix(master, point, index): the harness's documented derivation of
// per-system seeds. Appending sweep points or systems never changes the
// seed of any existing (point, index) pair.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t point,
                              std::uint64_t index) {
    return Rng(master).child(point + 1).child(0x100000000ULL + index).next_u64();
}

} // namespace leftrs

#endif
