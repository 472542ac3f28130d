#pragma once

#include <cstdint>

namespace cdii {

// Deterministic stream generator used everywhere randomness is needed.
// The algorithm is fixed on purpose (SplitMix64 core, open-interval uniforms,
// Marsaglia polar Gaussians) so that datasets and initializations are
// reproducible from a seed independently of the standard library's
// distribution implementations. See README for the exact stream layout.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1): (k + 0.5) / 2^53.
    double uniform01();

    /// Uniform on (lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via the Marsaglia polar method (second value cached).
    double gaussian();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Derives an independent sub-stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace cdii
