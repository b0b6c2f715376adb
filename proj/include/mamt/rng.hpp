#pragma once

#include <cstdint>

namespace mamt {

/// SplitMix64 with hand-rolled uniform mappings. Chosen over <random> engines
/// and distributions so that streams are bit-identical across platforms and
/// standard library versions — generated instances must reproduce exactly.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [lo, hi) from the top 53 bits.
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    /// Uniform integer in [lo, hi] by rejection-free modulo of the top bits;
    /// ranges here are tiny, so the modulo bias is far below reproducibility
    /// concerns (and the stream is pinned by tests either way).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

  private:
    std::uint64_t state_;
};

} // namespace mamt
