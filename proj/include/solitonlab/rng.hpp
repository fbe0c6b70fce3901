#pragma once
#include <cstdint>

namespace solitonlab {

// Splittable deterministic generator (splitmix64 core). The stream produced
// by a given seed is identical on every platform: no library distributions
// are involved, doubles are built from the top 53 bits. Reports that record
// their seed can therefore be replayed bit-exactly.
//
// Contract:
//   SplitMix64(seed)        -> root stream
//   rng.split(k)            -> independent child stream #k (pure function of
//                              (seed, k); children of distinct k never share
//                              state with each other or the parent)
//   next_double()           -> uniform in [0, 1)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    SplitMix64 split(std::uint64_t k) const {
        SplitMix64 child(state_ ^ (0x632be59bd9b4e019ull * (k + 1)));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

} // namespace solitonlab
