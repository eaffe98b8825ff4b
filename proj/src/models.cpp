#include "dilatox/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace dilatox::models {

State::State(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > kMaxDim) throw DomainError("State: dimension must be 1..4");
}

State::State(std::initializer_list<double> values) : State(values.size()) {
    std::copy(values.begin(), values.end(), v_.begin());
}

State::State(std::span<const double> values) : State(values.size()) {
    std::copy(values.begin(), values.end(), v_.begin());
}

std::complex<double> State::as_complex() const {
    if (dim_ != 2) throw ContractError("State::as_complex requires a two-dimensional state");
    return {v_[0], v_[1]};
}

double State::norm() const noexcept { return std::sqrt(dot(*this)); }

double State::dot(const State& other) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += v_[i] * other.v_[i];
    return s;
}

bool State::finite() const noexcept {
    for (std::size_t i = 0; i < dim_; ++i) {
        if (!std::isfinite(v_[i])) return false;
    }
    return true;
}

State& State::operator+=(const State& other) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) v_[i] += other.v_[i];
    return *this;
}

State& State::operator*=(double s) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) v_[i] *= s;
    return *this;
}

bool operator==(const State& a, const State& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i < a.dim_; ++i) {
        if (a.v_[i] != b.v_[i]) return false;
    }
    return true;
}

namespace {

void check_kappa(double kappa, const char* who) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        std::ostringstream msg;
        msg << who << ": kappa must satisfy 0 < kappa < 1 (dissipative contraction), got " << kappa;
        throw DomainError(msg.str());
    }
}

void check_positive(double value, const char* who, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << who << ": " << name << " must be positive, got " << value;
        throw DomainError(msg.str());
    }
}

}  // namespace

void validate(const MapSpec& spec) {
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, LinearDet>) {
                check_kappa(m.kappa, "LinearDet");
                if (m.A.dim() == 0) throw DomainError("LinearDet: A must have dimension >= 1");
                if (!m.A.finite()) throw DomainError("LinearDet: A must be finite");
            } else {
                check_kappa(m.kappa, "Ikeda");
                if (!std::isfinite(m.lambda) || !std::isfinite(m.theta0)) {
                    throw DomainError("Ikeda: lambda and theta0 must be finite");
                }
            }
        },
        spec);
}

std::size_t state_dim(const MapSpec& spec) noexcept {
    if (const auto* lin = std::get_if<LinearDet>(&spec)) return lin->A.dim();
    return 2;
}

double contraction(const MapSpec& spec) noexcept {
    return std::visit([](const auto& m) { return m.kappa; }, spec);
}

State apply_map(const MapSpec& spec, const State& x) {
    if (const auto* lin = std::get_if<LinearDet>(&spec)) {
        State out = lin->A;
        for (std::size_t i = 0; i < out.dim(); ++i) out[i] += lin->kappa * x[i];
        return out;
    }
    const auto& ik = std::get<Ikeda>(spec);
    const double re = x[0];
    const double im = x[1];
    const double phase = ik.lambda * (re * re + im * im) + ik.theta0;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    return State{1.0 + ik.kappa * (re * c - im * s), ik.kappa * (re * s + im * c)};
}

double OrnsteinUhlenbeck::lag_correlation() const { return std::exp(-T_del / tau_cor); }

void validate(const KuboAndersen& ka, std::size_t dim) {
    if (ka.points.empty()) throw DomainError("KuboAndersen: needs at least one point");
    if (ka.points.size() != ka.probs.size()) {
        throw DomainError("KuboAndersen: points and probs must have equal length");
    }
    for (const auto& p : ka.points) {
        if (p.dim() != dim) {
            throw DomainError("KuboAndersen: point dimension " + std::to_string(p.dim()) +
                              " does not match state dimension " + std::to_string(dim));
        }
        if (!p.finite()) throw DomainError("KuboAndersen: points must be finite");
    }
    double total = 0.0;
    for (double p : ka.probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw DomainError("KuboAndersen: probabilities must be nonnegative");
        }
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "KuboAndersen: probabilities must sum to 1 within 1e-12, got " << total;
        throw DomainError(msg.str());
    }
}

void validate(const NoiseSpec& spec, std::size_t dim) {
    if (dim == 0 || dim > State::kMaxDim) throw DomainError("noise: dimension must be 1..4");
    std::visit(
        [dim](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, GaussianNoise>) {
                check_positive(n.R, "GaussianNoise", "R");
            } else if constexpr (std::is_same_v<N, KuboAndersen>) {
                validate(n, dim);
            } else if constexpr (std::is_same_v<N, OrnsteinUhlenbeck>) {
                check_positive(n.R, "OrnsteinUhlenbeck", "R");
                check_positive(n.tau_cor, "OrnsteinUhlenbeck", "tau_cor");
                check_positive(n.T_del, "OrnsteinUhlenbeck", "T_del");
            } else if constexpr (std::is_same_v<N, MixedNoise>) {
                check_positive(n.gaussian.R, "MixedNoise", "R");
                validate(n.ka, dim);
            }
        },
        spec);
}

NoiseSampler::NoiseSampler(NoiseSpec spec, std::size_t dim) : spec_(std::move(spec)), dim_(dim) {
    validate(spec_, dim_);
    const KuboAndersen* ka = std::get_if<KuboAndersen>(&spec_);
    if (const auto* mixed = std::get_if<MixedNoise>(&spec_)) ka = &mixed->ka;
    if (ka != nullptr) {
        cumulative_.resize(ka->probs.size());
        std::partial_sum(ka->probs.begin(), ka->probs.end(), cumulative_.begin());
    }
}

State NoiseSampler::draw_ka(const KuboAndersen& ka, numkit::Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         cumulative_.size() - 1);
    return ka.points[k];
}

State NoiseSampler::next(numkit::Rng& rng) {
    State out(dim_);
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, GaussianNoise>) {
                numkit::gaussian_sample(rng, n.R, out.span());
            } else if constexpr (std::is_same_v<N, KuboAndersen>) {
                out = draw_ka(n, rng);
            } else if constexpr (std::is_same_v<N, MixedNoise>) {
                numkit::gaussian_sample(rng, n.gaussian.R, out.span());
                out += draw_ka(n.ka, rng);
            } else if constexpr (std::is_same_v<N, OrnsteinUhlenbeck>) {
                const double sigma = std::sqrt(0.5 * n.R);
                if (!ou_state_) {
                    for (double& v : out.span()) v = sigma * rng.normal();
                } else {
                    const double rho = n.lag_correlation();
                    const double innovation = sigma * std::sqrt(1.0 - rho * rho);
                    for (std::size_t i = 0; i < dim_; ++i) {
                        out[i] = rho * (*ou_state_)[i] + innovation * rng.normal();
                    }
                }
                ou_state_ = out;
            }
        },
        spec_);
    return out;
}

State sample_noise(const NoiseSpec& spec, numkit::Rng& rng, std::size_t dim,
                   const std::optional<State>& prev) {
    if (prev && prev->dim() != dim) {
        throw ContractError("sample_noise: previous noise value has the wrong dimension");
    }
    NoiseSampler sampler(spec, dim);
    if (prev && std::holds_alternative<OrnsteinUhlenbeck>(spec)) {
        const auto& ou = std::get<OrnsteinUhlenbeck>(spec);
        const double rho = ou.lag_correlation();
        const double innovation = std::sqrt(0.5 * ou.R) * std::sqrt(1.0 - rho * rho);
        State out(dim);
        for (std::size_t i = 0; i < dim; ++i) out[i] = rho * (*prev)[i] + innovation * rng.normal();
        return out;
    }
    return sampler.next(rng);
}

namespace detail {

void throw_divergence(const State& x, std::size_t step) {
    std::ostringstream msg;
    msg << "iterate: state left the divergence guard at step " << step << " (|X| = " << x.norm()
        << ")";
    throw DivergenceError(msg.str(), step);
}

}  // namespace detail

std::vector<State> iterate(const MapSpec& map, const NoiseSpec& noise, const State& x0,
                           std::size_t n, numkit::Rng& rng) {
    validate(map);
    NoiseSampler sampler(noise, state_dim(map));
    std::vector<State> out;
    out.reserve(n + 1);
    iterate_stream(map, sampler, x0, n, rng, [&](std::size_t, const State& x) { out.push_back(x); });
    return out;
}

}  // namespace dilatox::models
