#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "dilatox/ikeda.hpp"
#include "dilatox/numkit/bessel.hpp"

using namespace dilatox;
using namespace dilatox::ikeda;

namespace {

double xi_oracle(double kappa, double beta) {
    double p = 1.0;
    double b = beta;
    for (int k = 0; k < 200; ++k) {
        p *= boost::math::cyl_bessel_j(0, b);
        b *= kappa;
    }
    return p;
}

std::vector<double> radii(double hi, std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = hi * double(i) / double(n - 1);
    return r;
}

}  // namespace

TEST_SUITE("ikeda") {

TEST_CASE("Xi against a long Bessel product") {
    CHECK(xi(0.5, 0.0) == 1.0);
    CHECK(xi(0.5, 1.0) == doctest::Approx(0.703262869991).epsilon(1e-11));
    for (double kappa : {0.3, 0.7}) {
        for (double beta : {0.4, 3.0, 17.5, 60.0, 240.0}) {
            CHECK(std::fabs(xi(kappa, beta) - xi_oracle(kappa, beta)) < 1e-13);
        }
    }
    numkit::ProductResult<double> report;
    xi(0.5, 1000.0, {}, &report);
    CHECK(report.converged);
    CHECK(std::pow(0.5, double(report.terms_used - 1)) * 1000.0 < 2.0);
}

TEST_CASE("Xi recursion and cache") {
    XiFunction f(0.6);
    std::vector<double> betas;
    for (int i = 0; i <= 300; ++i) betas.push_back(0.5 * i);
    f.sample(betas);
    CHECK(f.values().size() == betas.size());
    CHECK(f.flagged() == 0);
    CHECK(f.recursion_residual_max() < 1e-12);
    CHECK(f.values()[40] == f(20.0));
}

TEST_CASE("P_ch is a probability density supported on the attractor disk") {
    const double kappa = 0.3;
    const double radius = attractor_radius(kappa);
    CHECK(radius == doctest::Approx(0.3 / 0.7));
    const auto d = p_ch(kappa, radii(0.6, 121));
    CHECK(d.mass == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(d.cdf.back() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(d.cdf.front() == doctest::Approx(0.0));
    for (std::size_t i = 0; i < d.r.size(); ++i) {
        if (d.r[i] > radius + 0.01) CHECK(std::fabs(d.density[i]) < 1e-4);
        if (i > 0) CHECK(d.cdf[i] >= d.cdf[i - 1] - 1e-5);
    }
    CHECK(d.min_unclipped > -1e-3);
    for (double v : d.clipped()) CHECK(v >= 0.0);
    CHECK(d.cdf_at(5.0) == doctest::Approx(d.cdf.back()));
    CHECK(d.cdf_at(-1.0) == 0.0);
    CHECK(d.density_at(5.0) == 0.0);
    CHECK(d.beta_max >= 16.0);
}

TEST_CASE("vanishing noise reproduces P_ch") {
    const auto r = radii(0.6, 61);
    const auto clean = p_ch(0.5, r);
    const auto noisy = p_st_radial(0.5, 1e-5, r);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::fabs(clean.cdf[i] - noisy.cdf[i]));
    CHECK(worst < 5e-3);
}

TEST_CASE("2D stationary density against the angular-average integral") {
    // p(rho) = int P_ch(r) (2 r / R') exp(-(rho^2 + r^2) / R') I0(2 rho r / R') dr
    const double kappa = 0.3, R = 0.1, Rp = R / (1 - kappa * kappa);
    const auto r = radii(0.45, 901);
    const auto pch = p_ch(kappa, r);
    auto oracle = [&](double rho) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double w = (i == 0 || i + 1 == r.size()) ? 0.5 : 1.0;
            s += w * pch.density[i] * 2.0 * r[i] / Rp * std::exp(-(rho * rho + r[i] * r[i]) / Rp) *
                 boost::math::cyl_bessel_i(0, 2.0 * rho * r[i] / Rp);
        }
        return s * (r[1] - r[0]);
    };
    const numkit::Grid grid = numkit::Grid::plane({-0.6, 2.6, 81}, {-1.6, 1.6, 81});
    const auto pst = p_st_ikeda(kappa, R, grid);
    CHECK(pst.mass == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(pst.gaussian_std == doctest::Approx(std::sqrt(Rp / 2.0)));
    const std::size_t n = 81;
    for (std::size_t j : {40, 44, 48, 52, 56, 60, 70}) {
        for (std::size_t i : {40, 46}) {
            const auto p = grid.point(i * n + j);
            const double rho = std::hypot(p[0] - 1.0, p[1]);
            CHECK(std::fabs(pst.density.values[i * n + j] - oracle(rho)) < 1e-5);
        }
    }
    // grid centered on X = 1 with equal steps: swapping axes is a reflection
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(std::fabs(pst.density.values[i * n + j] - pst.density.values[j * n + i]) < 1e-10);
        }
    }
    CHECK_THROWS_AS(p_st_ikeda(kappa, R, numkit::Grid::plane({-0.6, 2.6, 21}, {-1.6, 1.6, 21})), DomainError);
    CHECK_THROWS_AS(p_st_ikeda(kappa, 0.0, grid), DomainError);
}

TEST_CASE("direct convolution route agrees to second order in the grid step") {
    const double kappa = 0.3, R = 0.1;
    const numkit::Grid grid = numkit::Grid::plane({-0.6, 2.6, 81}, {-1.6, 1.6, 81});
    PStOptions opt;
    opt.radial_points = 1001;
    const auto hankel = p_st_ikeda(kappa, R, grid);
    const auto direct = p_st_ikeda_direct(kappa, R, grid, opt, 4);
    CHECK(direct.mass == doctest::Approx(1.0).epsilon(1e-3));
    double l1 = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        l1 += std::fabs(hankel.density.values[k] - direct.density.values[k]) * grid.cell_volume();
    }
    // O(h^2) smoothing of the direct route: h^2 / 12 against a variance near 0.085
    const double h = grid.axis(0).step();
    CHECK(l1 < 4.0 * h * h / 12.0 / 0.085);
}

TEST_CASE("J0 envelope split") {
    const auto s30 = j0_envelope_split(30.0);
    CHECK(std::fabs(s30.chi * s30.phase_factor - numkit::bessel_j0(30.0)) < 1e-2 * std::sqrt(2.0) * s30.chi);
    double prev = j0_envelope_split(0.5).chi;
    for (double x = 0.75; x < 150.0; x += 0.25) {
        const double chi = j0_envelope_split(x).chi;
        CHECK(chi < prev);
        prev = chi;
    }
    CHECK(j0_envelope_split(100.0).chi == doctest::Approx(std::sqrt(1.0 / (std::numbers::pi * 100.0))).epsilon(0.01));
    CHECK_THROWS_AS(j0_envelope_split(0.2), DomainError);
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(xi(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(p_ch(0.3, std::vector<double>{0.0, -0.1}), DomainError);
    HankelOptions tight;
    tight.beta_cap = 32.0;
    tight.quad_tol = 1e-12;
    CHECK_THROWS_AS(p_ch(0.3, radii(0.5, 11), {}, tight), NumericalError);
}

}
