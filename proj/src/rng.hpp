#pragma once

#include <cstdint>
#include <vector>

namespace semnet {

// splitmix64 (Vigna). Used for seeding and for deriving independent
// substreams; the update and output constants are the reference ones, so
// sequences are reproducible on any platform.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ seeded through splitmix64. All simulation randomness goes
// through this generator; replays depend on its exact sequence.
class Rng {
  public:
    Rng() : Rng(0) {}
    explicit Rng(uint64_t seed);

    // Derives an independent generator for (seed, stream). Streams with
    // different tags never share state.
    static Rng substream(uint64_t seed, uint64_t stream_tag);

    uint64_t next_u64();

    // Uniform in [0,1) with 53 significant bits.
    double uniform();
    // Uniform in [lo,hi).
    double uniform(double lo, double hi);
    // Uniform integer in [0,n), n > 0. Lemire multiply-shift, no rejection.
    uint64_t uniform_index(uint64_t n);
    // Standard normal via Box-Muller; pairs are cached.
    double normal();

    // Fisher-Yates over the whole vector.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    bool operator==(const Rng& other) const = default;

  private:
    uint64_t s_[4];
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace semnet
