#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dilatox/error.hpp"
#include "dilatox/numkit/rng.hpp"

namespace dilatox::models {

/// Point of the d-dimensional signal space (d <= 4). With d == 2 the two
/// components double as real and imaginary part of a complex amplitude.
class State {
public:
    static constexpr std::size_t kMaxDim = 4;

    State() = default;
    explicit State(std::size_t dim);
    State(std::initializer_list<double> values);
    explicit State(std::span<const double> values);
    static State from_complex(std::complex<double> z) { return State{z.real(), z.imag()}; }

    std::size_t dim() const noexcept { return dim_; }
    double& operator[](std::size_t i) noexcept { return v_[i]; }
    double operator[](std::size_t i) const noexcept { return v_[i]; }
    std::span<double> span() noexcept { return {v_.data(), dim_}; }
    std::span<const double> span() const noexcept { return {v_.data(), dim_}; }

    std::complex<double> as_complex() const;
    double norm() const noexcept;
    double dot(const State& other) const noexcept;
    bool finite() const noexcept;

    State& operator+=(const State& other) noexcept;
    State& operator*=(double s) noexcept;
    friend State operator+(State a, const State& b) noexcept { return a += b; }
    friend State operator*(double s, State a) noexcept { return a *= s; }
    friend bool operator==(const State& a, const State& b) noexcept;

private:
    std::array<double, kMaxDim> v_{};
    std::size_t dim_ = 0;
};

// ---- deterministic part F ----

/// F(X) = A + kappa X.
struct LinearDet {
    State A;
    double kappa = 0.5;
};

/// F(X) = 1 + kappa X exp(i (lambda |X|^2 + theta0)), X complex (d = 2).
struct Ikeda {
    double kappa = 0.5;
    double lambda = 1.0;
    double theta0 = 0.0;
};

using MapSpec = std::variant<LinearDet, Ikeda>;

void validate(const MapSpec& spec);
std::size_t state_dim(const MapSpec& spec) noexcept;
double contraction(const MapSpec& spec) noexcept;
State apply_map(const MapSpec& spec, const State& x);

// ---- stochastic part xi ----

struct NoNoise {};

struct GaussianNoise {
    double R = 0.1;  ///< density (pi R)^{-d/2} exp(-|X|^2 / R)
};

struct KuboAndersen {
    std::vector<State> points;
    std::vector<double> probs;
};

/// Sampled at multiples of T_del with the exact OU transition.
struct OrnsteinUhlenbeck {
    double R = 0.1;  ///< stationary law has per-component variance R/2
    double tau_cor = 1.0;
    double T_del = 1.0;

    double lag_correlation() const;
};

struct MixedNoise {
    GaussianNoise gaussian;
    KuboAndersen ka;
};

using NoiseSpec = std::variant<NoNoise, GaussianNoise, KuboAndersen, OrnsteinUhlenbeck, MixedNoise>;

/// Checks the invariants of the noise for states of dimension `dim`.
void validate(const NoiseSpec& spec, std::size_t dim);
void validate(const KuboAndersen& ka, std::size_t dim);

/// One draw of xi. For OrnsteinUhlenbeck `prev` is the previous noise value;
/// without it the draw comes from the stationary OU law.
State sample_noise(const NoiseSpec& spec, numkit::Rng& rng, std::size_t dim,
                   const std::optional<State>& prev = std::nullopt);

/// Reusable sampler: precomputes the Kubo-Andersen cumulative table and carries
/// the OU state between draws.
class NoiseSampler {
public:
    NoiseSampler(NoiseSpec spec, std::size_t dim);

    State next(numkit::Rng& rng);
    std::size_t dim() const noexcept { return dim_; }

private:
    State draw_ka(const KuboAndersen& ka, numkit::Rng& rng) const;

    NoiseSpec spec_;
    std::size_t dim_;
    std::vector<double> cumulative_;
    std::optional<State> ou_state_;
};

// ---- iteration ----

/// |X| beyond this aborts iteration.
inline constexpr double kDivergenceGuard = 1e12;

/// Streams X_0..X_n with X_{N+1} = xi_N + F(X_N) to sink(N, X_N).
/// Throws DivergenceError carrying the step index on non-finite or runaway states.
template <class Sink>
void iterate_stream(const MapSpec& map, NoiseSampler& noise, State x, std::size_t n,
                    numkit::Rng& rng, Sink&& sink);

std::vector<State> iterate(const MapSpec& map, const NoiseSpec& noise, const State& x0,
                           std::size_t n, numkit::Rng& rng);

namespace detail {
[[noreturn]] void throw_divergence(const State& x, std::size_t step);
}

template <class Sink>
void iterate_stream(const MapSpec& map, NoiseSampler& noise, State x, std::size_t n,
                    numkit::Rng& rng, Sink&& sink) {
    if (x.dim() != state_dim(map)) {
        throw ContractError("iterate: initial state dimension does not match the map");
    }
    if (!x.finite() || x.norm() > kDivergenceGuard) detail::throw_divergence(x, 0);
    sink(std::size_t{0}, x);
    for (std::size_t step = 1; step <= n; ++step) {
        State next = apply_map(map, x);
        next += noise.next(rng);
        if (!next.finite() || next.norm() > kDivergenceGuard) detail::throw_divergence(next, step);
        x = next;
        sink(step, x);
    }
}

}  // namespace dilatox::models
