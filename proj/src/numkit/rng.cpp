#include "dilatox/numkit/rng.hpp"

#include <cmath>
#include <numbers>

#include "dilatox/error.hpp"

namespace dilatox::numkit {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

Rng Rng::stream(std::uint64_t master, std::uint64_t stream) noexcept {
    std::uint64_t state = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    return Rng(splitmix64(state));
}

Rng::result_type Rng::operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    // 1 - uniform() lies in (0, 1], keeping the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

void gaussian_sample(Rng& rng, double R, std::span<double> out) {
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw DomainError("gaussian_sample: R must be positive and finite");
    }
    const double sigma = std::sqrt(0.5 * R);
    for (double& x : out) x = sigma * rng.normal();
}

}  // namespace dilatox::numkit
