#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dilatox/error.hpp"
#include "dilatox/numkit/bessel.hpp"
#include "dilatox/numkit/grid.hpp"
#include "dilatox/numkit/parallel.hpp"
#include "dilatox/numkit/product.hpp"
#include "dilatox/numkit/quadrature.hpp"
#include "dilatox/numkit/rng.hpp"

using namespace dilatox;
using namespace dilatox::numkit;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// Power series in 50-digit arithmetic: J_nu(x) = sum (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!).
double series_j(int nu, double xd) {
    const big x = xd;
    const big half = x / 2;
    big term = boost::multiprecision::pow(half, nu);
    for (int j = 1; j <= nu; ++j) term /= j;
    big sum = term;
    const big q = half * half;
    for (int k = 1; k < 400; ++k) {
        term *= -q / (big(k) * big(k + nu));
        sum += term;
        if (abs(term) < big(1e-40)) break;
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_SUITE("numkit") {

TEST_CASE("bessel J0 and J1 against a multiprecision power series") {
    double worst = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double x = 0.1 * i + 0.0137;
        const double j0 = series_j(0, x);
        const double j1 = series_j(1, x);
        worst = std::max({worst, std::fabs(bessel_j0(x) - j0), std::fabs(bessel_j1(x) - j1)});
        const auto pair = bessel_j01(x);
        CHECK(pair.j0 == doctest::Approx(bessel_j0(x)).epsilon(1e-15));
        CHECK(pair.j1 == doctest::Approx(bessel_j1(x)).epsilon(1e-15));
    }
    CHECK(worst < 1e-14);
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(bessel_j1(0.0) == 0.0);
}

TEST_CASE("bessel parity and argument checks") {
    CHECK(bessel_j0(-7.3) == bessel_j0(7.3));
    CHECK(bessel_j1(-31.0) == -bessel_j1(31.0));
    CHECK_THROWS_AS(bessel_j0(std::nan("")), DomainError);
    CHECK_THROWS_AS(bessel_y0(0.0), DomainError);
    CHECK_THROWS_AS(bessel_modulus0(-1.0), DomainError);
}

TEST_CASE("bessel modulus decreases and approaches sqrt(2/(pi x))") {
    double prev = bessel_modulus0(0.05);
    for (double x = 0.1; x < 200.0; x += 0.37) {
        const double m = bessel_modulus0(x);
        CHECK(m < prev);
        prev = m;
    }
    const double x = 400.0;
    CHECK(bessel_modulus0(x) == doctest::Approx(std::sqrt(2.0 / (std::numbers::pi * x))).epsilon(1e-5));
    // Y0 zero near 0.8935769662791675
    CHECK(std::fabs(bessel_y0(0.8935769662791675)) < 1e-14);
}

TEST_CASE("adaptive quadrature on known integrals") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

    auto c = integrate([](double x) { return std::exp(std::complex<double>(0.0, 3.0 * x)); }, 0.0,
                       2.0 * std::numbers::pi, 1e-12);
    CHECK(std::abs(c.value) < 1e-12);

    // K15 integrates polynomials up to degree 22 exactly on one panel.
    auto f = [](double x) { return std::pow(x, 20); };
    const auto panel = gk15_panel(f, 0.0, 1.0);
    CHECK(panel.kronrod == doctest::Approx(1.0 / 21.0).epsilon(1e-14));

    CHECK(quad_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-8, 4000) ==
          doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("quad_adaptive reports exhausted subdivision") {
    auto nasty = [](double x) { return std::sin(1.0 / (x + 1e-4)); };
    try {
        quad_adaptive(nasty, 0.0, 1.0, 1e-14, 3);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.error_estimate() > 1e-14);
    }
    CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0, 1e-8), DomainError);
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs = differs || x != c();
    }
    CHECK(differs);
    Rng s0 = Rng::stream(9, 0), s0b = Rng::stream(9, 0), s1 = Rng::stream(9, 1);
    const auto v = s0();
    CHECK(v == s0b());
    CHECK(v != s1());
}

TEST_CASE("rng uniform and normal moments") {
    Rng rng(5);
    const int n = 200000;
    double su = 0.0, sn = 0.0, sn2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK_UNARY(u >= 0.0);
        CHECK_UNARY(u < 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::fabs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));

    double var = 0.0;
    std::vector<double> x(2);
    for (int i = 0; i < n; ++i) {
        gaussian_sample(rng, 0.3, x);
        var += x[0] * x[0] + x[1] * x[1];
    }
    CHECK(var / (2.0 * n) == doctest::Approx(0.15).epsilon(0.02));
    CHECK_THROWS_AS(gaussian_sample(rng, 0.0, x), DomainError);
}

TEST_CASE("symmetric axis mirrors exactly") {
    const Axis a(-3.0, 3.0, 61);
    CHECK(a.symmetric());
    CHECK(a[30] == 0.0);
    for (std::size_t i = 0; i < 61; ++i) CHECK(a[i] == -a[60 - i]);
    CHECK(a[0] == -3.0);
    CHECK(a[60] == 3.0);
    CHECK_FALSE(Axis(-1.0, 2.0, 5).symmetric());
    CHECK_THROWS_AS(Axis(0.0, 1.0, 1), DomainError);
    CHECK_THROWS_AS(Axis(1.0, 0.0, 3), DomainError);
}

TEST_CASE("grid indexing is row-major") {
    const Grid g = Grid::plane(Axis(0.0, 1.0, 3), Axis(10.0, 14.0, 5));
    CHECK(g.size() == 15);
    CHECK(g.dim() == 2);
    const auto idx = g.unravel(7);
    CHECK(idx[0] == 1);
    CHECK(idx[1] == 2);
    const auto p = g.point(7);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 12.0);
    CHECK(g.cell_volume() == doctest::Approx(0.5));
    CHECK(g.same_as(Grid::plane(Axis(0.0, 1.0, 3), Axis(10.0, 14.0, 5))));
    CHECK_FALSE(g.same_as(Grid::line(0.0, 1.0, 3)));
}

TEST_CASE("parallel_for results do not depend on the thread cap") {
    std::vector<double> values(10007);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(double(i)) * 1e-3 + 1.0 / (i + 1.0);
    auto run = [&](unsigned cap) {
        set_thread_cap(cap);
        std::vector<double> out(values.size());
        parallel_for(values.size(), [&](std::size_t i) { out[i] = std::exp(values[i]); });
        return pairwise_sum<double>(out);
    };
    const unsigned saved = thread_cap();
    const double one = run(1);
    const double four = run(4);
    set_thread_cap(saved);
    CHECK(one == four);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
    const unsigned saved = thread_cap();
    set_thread_cap(4);
    try {
        parallel_for(100, [](std::size_t i) {
            if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
    }
    set_thread_cap(saved);
}

TEST_CASE("truncated product includes the stopping factor") {
    // factors 1 + 2^-k; stops at the first k with 2^-k < 1e-3, i.e. k = 10
    const auto r = truncated_product([](std::size_t k) { return 1.0 + std::ldexp(1.0, -int(k)); },
                                     ProductTruncation(1e-3, 100));
    CHECK(r.converged);
    CHECK(r.terms_used == 11);
    double expected = 1.0;
    for (int k = 0; k <= 10; ++k) expected *= 1.0 + std::ldexp(1.0, -k);
    CHECK(r.value == expected);
}

TEST_CASE("truncated product skips early candidates and reports the cap") {
    auto term = [](std::size_t k) { return k == 2 ? 1.0 : 1.0 + 1.0 / double((k + 1) * (k + 1)); };
    CHECK(truncated_product(term, ProductTruncation(1e-6, 10000)).terms_used == 3);
    CHECK(truncated_product(term, ProductTruncation(1.5e-6, 10000), 3).terms_used == 817);
    const auto capped = truncated_product(term, ProductTruncation(1e-12, 50), 3);
    CHECK_FALSE(capped.converged);
    CHECK(capped.terms_used == 50);
    CHECK_THROWS_AS(ProductTruncation(0.0, 10), DomainError);
}

TEST_CASE("shrink_index") {
    CHECK(shrink_index(0.5, 0.5) == 0);
    CHECK(shrink_index(8.0, 0.5) == 3);
    CHECK(shrink_index(-8.0, 0.5, 2.0) == 2);
    const std::size_t k = shrink_index(100.0, 0.3);
    CHECK(100.0 * std::pow(0.3, double(k)) <= 1.0);
    CHECK(100.0 * std::pow(0.3, double(k - 1)) > 1.0);
}

}
