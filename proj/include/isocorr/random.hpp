#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace isocorr {

/// Mixes a base seed with a stream index so that every trial draws from its
/// own reproducible sequence regardless of execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable random source. The engine is std::mt19937_64, whose output is
/// fixed by the standard; the distributions are implemented here because the
/// standard library ones differ between implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer on [0, n). Unbiased (rejection sampling).
    std::size_t index(std::size_t n);

    /// Standard normal deviate (Box-Muller, both outputs used).
    double normal();

    /// k distinct indices drawn uniformly from [0, n) via partial Fisher-Yates.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace isocorr
