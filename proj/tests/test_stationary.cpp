#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dilatox/stationary.hpp"

using namespace dilatox;
using namespace dilatox::stationary;
using cplx = std::complex<double>;

namespace {

// Direct product over the noise history: X = sum_k kappa^k (A + xi_k).
cplx gauss_product(double A, double kappa, double R, double U) {
    cplx psi = 1.0;
    double s = 1.0;
    for (int k = 0; k < 400; ++k) {
        psi *= std::exp(cplx(-0.25 * R * s * s * U * U, -A * s * U));
        s *= kappa;
    }
    return psi;
}

cplx ka_product(double kappa, double R, const std::vector<double>& x, const std::vector<double>& p, double U) {
    cplx psi = 1.0;
    double s = 1.0;
    for (int k = 0; k < 400; ++k) {
        cplx f = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) f += p[j] * std::exp(cplx(0.0, -x[j] * s * U));
        psi *= f * std::exp(-0.25 * R * s * s * U * U);
        s *= kappa;
    }
    return psi;
}

}  // namespace

TEST_SUITE("stationary") {

TEST_CASE("deterministic model: pure phase at the fixed point") {
    const auto grid = Grid::line(-4.0, 4.0, 41);
    const auto cf = charfn_linear_det(models::State{1.5}, 0.25, grid);
    CHECK(cf.mean.at(0) == doctest::Approx(2.0));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double U = grid.point(i)[0];
        CHECK(std::abs(cf.values[i] - std::exp(cplx(0.0, -2.0 * U))) < 1e-14);
    }
    CHECK(fixed_point(models::State{1.0, -1.0}, 0.5) == models::State{2.0, -2.0});
}

TEST_CASE("linear Gaussian closed form equals the noise-history product") {
    for (double kappa : {0.3, 0.8}) {
        const auto grid = Grid::line(-6.0, 6.0, 61);
        const auto cf = charfn_linear_gauss(models::State{0.7}, kappa, 0.4, grid);
        CHECK(cf.variance.at(0) == doctest::Approx(0.4 / (2.0 * (1.0 - kappa * kappa))));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(cf.values[i] - gauss_product(0.7, kappa, 0.4, grid.point(i)[0])) < 1e-12);
        }
    }
}

TEST_CASE("Gauss plus Kubo-Andersen product against a direct product") {
    const models::KuboAndersen ka{{models::State{-1.0}, models::State{0.5}}, {0.4, 0.6}};
    const auto grid = Grid::line(-20.0, 20.0, 81);
    const auto cf = charfn_gauss_ka(0.6, 0.05, ka, grid);
    CHECK(cf.flagged == 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double U = grid.point(i)[0];
        CHECK(std::abs(cf.values[i] - ka_product(0.6, 0.05, {-1.0, 0.5}, {0.4, 0.6}, U)) < 1e-12);
    }
    const GaussKaModel model{0.6, 0.05, ka};
    CHECK(functional_residual_max(model, grid) < 1e-12);
}

TEST_CASE("characteristic function invariants") {
    // Psi(0) = 1, |Psi| <= 1, Psi(-U) = conj Psi(U)
    const models::KuboAndersen ka{{models::State{1.0, 0.0}, models::State{0.0, 1.0}, models::State{-1.0, -1.0}},
                                  {0.2, 0.3, 0.5}};
    const GaussKaModel model{0.5, 0.1, ka};
    const auto grid = Grid::plane({-4.0, 4.0, 17}, {-4.0, 4.0, 17});
    const auto cf = charfn(model, grid);
    const std::size_t n = grid.size();
    CHECK(std::abs(cf.values[n / 2] - 1.0) < 1e-15);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(cf.values[i]) <= 1.0 + 1e-14);
        CHECK(std::abs(cf.values[i] - std::conj(cf.values[n - 1 - i])) < 1e-14);
    }
    CHECK(functional_residual_max(model, grid) < 1e-12);
}

TEST_CASE("density inversion recovers the Gaussian law") {
    const double kappa = 0.5, R = 0.3, A = 1.0;
    const auto cf = charfn_linear_gauss(models::State{A}, kappa, R, Grid::line(-40.0, 40.0, 801));
    const auto xgrid = Grid::line(-1.0, 5.0, 241);
    const auto d = density_from_charfn(cf, xgrid);
    CHECK(d.boundary_decay_ok);
    CHECK(d.mass == doctest::Approx(1.0).epsilon(1e-3));
    const double var = R / (2.0 * (1.0 - kappa * kappa));
    for (std::size_t i = 0; i < xgrid.size(); ++i) {
        const double x = xgrid.point(i)[0];
        const double p = std::exp(-(x - 2.0) * (x - 2.0) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
        CHECK(std::fabs(d.density.values[i] - p) < 1e-8);
    }
}

TEST_CASE("inversion warns on a truncated frequency grid and rejects asymmetric ones") {
    const auto narrow = charfn_linear_gauss(models::State{0.0}, 0.5, 0.3, Grid::line(-3.0, 3.0, 61));
    const auto d = density_from_charfn(narrow, Grid::line(-2.0, 2.0, 41));
    CHECK_FALSE(d.boundary_decay_ok);
    CHECK_FALSE(d.warning.empty());
    const auto skewed = charfn_linear_gauss(models::State{0.0}, 0.5, 0.3, Grid::line(-3.0, 5.0, 61));
    CHECK_THROWS_AS(density_from_charfn(skewed, Grid::line(-2.0, 2.0, 41)), DomainError);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(validate(StationaryModel{LinearGaussModel{models::State{1.0}, 0.5, -0.1}}), DomainError);
    CHECK_THROWS_AS(validate(StationaryModel{LinearDetModel{models::State{1.0}, 1.0}}), DomainError);
    const models::KuboAndersen bad{{models::State{1.0}}, {0.5}};
    CHECK_THROWS_AS(validate(StationaryModel{GaussKaModel{0.5, 0.1, bad}}), DomainError);
    CHECK(model_dim(StationaryModel{LinearDetModel{models::State{1.0, 2.0}, 0.5}}) == 2);
}

}
