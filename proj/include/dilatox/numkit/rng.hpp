#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace dilatox::numkit {

/// SplitMix64 finalizer; used to expand seeds and derive stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** engine with explicit seeding and stream splitting.
///
/// Same seed gives a bit-identical stream on every platform: uniform and normal
/// variates are derived here, not through <random> distributions whose output
/// is implementation defined.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    /// Independent stream `stream` of master seed `master`. Stream seeds are
    /// splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15), so they do not
    /// depend on how many streams exist or which thread consumes them.
    static Rng stream(std::uint64_t master, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// Fills `out` with a sample of density (pi R)^{-d/2} exp(-<X,X>/R), d = out.size().
/// Per-component variance is R/2. Throws DomainError for R <= 0.
void gaussian_sample(Rng& rng, double R, std::span<double> out);

}  // namespace dilatox::numkit
