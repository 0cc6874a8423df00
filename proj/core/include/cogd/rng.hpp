#pragma once

#include <cstdint>
#include <string_view>

namespace cogd {

// Counter-based PRNG: each 64-bit output is the SplitMix64 finalizer
// (Steele, Lea & Flood 2014; the fixed-increment variant popularized by
// xoshiro's seeding routine) applied to seed ^ stream ^ golden-ratio
// increments of a running counter. Stateless given (seed, stream, counter),
// so draws are bit-reproducible across platforms and independent of call
// interleaving between consumers.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    // Deterministic sub-stream derived from a label, e.g. "mask" or "init".
    CounterRng split(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
        for (char c : label) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 0x100000001b3ULL;
        }
        return CounterRng(seed_, stream_ ^ h);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ ^ stream_ ^ (counter_++ * 0x9e3779b97f4a7c15ULL);
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller on two uniform draws.
    double next_normal();

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace cogd
