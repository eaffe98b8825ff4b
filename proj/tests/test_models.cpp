#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "dilatox/models.hpp"

using namespace dilatox;
using namespace dilatox::models;

TEST_SUITE("models") {

TEST_CASE("state arithmetic") {
    State a{1.0, 2.0};
    const State b{0.5, -1.0};
    CHECK(a.dot(b) == -1.5);
    CHECK((a + b) == State{1.5, 1.0});
    CHECK((2.0 * a) == State{2.0, 4.0});
    CHECK(a.norm() == doctest::Approx(std::sqrt(5.0)));
    CHECK(State::from_complex({3.0, -4.0}).as_complex() == std::complex<double>(3.0, -4.0));
    CHECK_THROWS_AS(State{1.0}.as_complex(), ContractError);
    CHECK_THROWS_AS(State(std::size_t{5}), DomainError);
}

TEST_CASE("linear and Ikeda maps") {
    CHECK(apply_map(LinearDet{State{1.0, -1.0}, 0.5}, State{2.0, 2.0}) == State{2.0, 0.0});
    const Ikeda ik{0.4, 3.0, 0.25};
    const std::complex<double> x(0.3, -0.7);
    const auto y = apply_map(ik, State::from_complex(x)).as_complex();
    const auto expect = 1.0 + 0.4 * x * std::exp(std::complex<double>(0.0, 3.0 * std::norm(x) + 0.25));
    CHECK(std::abs(y - expect) < 1e-15);
    // |F(X) - 1| = kappa |X|
    CHECK(std::abs(y - 1.0) == doctest::Approx(0.4 * std::abs(x)));
    CHECK(contraction(ik) == 0.4);
    CHECK(state_dim(ik) == 2);
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(validate(MapSpec{LinearDet{State{1.0}, 1.0}}), DomainError);
    CHECK_THROWS_AS(validate(MapSpec{Ikeda{-0.1, 1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(validate(NoiseSpec{GaussianNoise{0.0}}, 1), DomainError);
    CHECK_THROWS_AS(validate(KuboAndersen{{State{1.0}}, {0.9}}, 1), DomainError);
    CHECK_THROWS_AS(validate(KuboAndersen{{State{1.0}, State{2.0}}, {1.2, -0.2}}, 1), DomainError);
    CHECK_THROWS_AS(validate(KuboAndersen{{State{1.0, 0.0}}, {1.0}}, 1), DomainError);
    CHECK_THROWS_AS(validate(NoiseSpec{OrnsteinUhlenbeck{0.1, 0.0, 1.0}}, 1), DomainError);
}

TEST_CASE("Kubo-Andersen frequencies match the probabilities") {
    const KuboAndersen ka{{State{-1.0}, State{0.0}, State{2.0}}, {0.2, 0.5, 0.3}};
    NoiseSampler sampler(ka, 1);
    numkit::Rng rng(21);
    const int n = 200000;
    std::vector<int> hits(3);
    for (int i = 0; i < n; ++i) {
        const double v = sampler.next(rng)[0];
        hits[v < -0.5 ? 0 : (v < 1.0 ? 1 : 2)]++;
    }
    for (int k = 0; k < 3; ++k) {
        const double p = ka.probs[k];
        CHECK(std::fabs(hits[k] / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("Ornstein-Uhlenbeck sampler has the stationary variance and lag correlation") {
    const OrnsteinUhlenbeck ou{0.4, 2.0, 1.0};
    NoiseSampler sampler(ou, 1);
    numkit::Rng rng(8);
    const int n = 400000;
    double s2 = 0.0, lag = 0.0, prev = sampler.next(rng)[0];
    for (int i = 0; i < n; ++i) {
        const double v = sampler.next(rng)[0];
        s2 += v * v;
        lag += v * prev;
        prev = v;
    }
    const double var = s2 / n;
    CHECK(var == doctest::Approx(0.2).epsilon(0.02));
    CHECK(lag / n / var == doctest::Approx(std::exp(-0.5)).epsilon(0.02));
    CHECK(ou.lag_correlation() == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("iteration is reproducible and reports divergence") {
    const MapSpec map = LinearDet{State{1.0}, 0.5};
    numkit::Rng a(3), b(3);
    const auto xa = iterate(map, GaussianNoise{0.2}, State{0.0}, 50, a);
    const auto xb = iterate(map, GaussianNoise{0.2}, State{0.0}, 50, b);
    CHECK(xa.size() == 51);
    CHECK(xa == xb);

    numkit::Rng r(1);
    try {
        iterate(LinearDet{State{2e12}, 0.5}, NoNoise{}, State{0.0}, 10, r);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.step() == 1);
    }
    CHECK_THROWS_AS(iterate(map, NoNoise{}, State{0.0, 0.0}, 3, r), ContractError);
}

}
