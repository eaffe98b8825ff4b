#include "dilatox/numkit/bessel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

#include "dilatox/error.hpp"

namespace dilatox::numkit {
namespace {

using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

constexpr double kAsymptoticLimit = 25.0;

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(name) + ": argument must be finite");
    }
}

struct Hankel {
    double p;
    double q;
};

// P and Q of the Hankel expansion for order nu (mu = 4 nu^2).
Hankel hankel_pq(double x, double mu) {
    double term = 1.0;
    double p = 1.0;
    double q = 0.0;
    double last = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        const double magnitude = std::fabs(term);
        if (magnitude > last) break;  // asymptotic series started to diverge
        last = magnitude;
        // t_k contributes to P for even k, to Q for odd k, with alternating signs.
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            default: p += term; break;
        }
        if (magnitude < 1e-18) break;
    }
    return {p, q};
}

constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;

// cos and sin of x - pi/4 from cos x and sin x, avoiding a large-argument subtraction.
struct Phase {
    double cw0;
    double sw0;
};

Phase phase0(double x) {
    const double c = std::cos(x);
    const double s = std::sin(x);
    return {kHalfSqrt2 * (c + s), kHalfSqrt2 * (s - c)};
}

double amplitude(double x) { return std::sqrt(2.0 / (std::numbers::pi * x)); }

// Order one has phase x - 3 pi/4: cos = sin(x - pi/4), sin = -cos(x - pi/4).
double j1_asymptotic(double x, const Phase& ph) {
    const auto [p, q] = hankel_pq(x, 4.0);
    return amplitude(x) * (p * ph.sw0 + q * ph.cw0);
}

double j0_asymptotic(double x, const Phase& ph) {
    const auto [p, q] = hankel_pq(x, 0.0);
    return amplitude(x) * (p * ph.cw0 - q * ph.sw0);
}

}  // namespace

double bessel_j0(double x) {
    require_finite(x, "bessel_j0");
    const double ax = std::fabs(x);
    if (ax < kAsymptoticLimit) return boost::math::cyl_bessel_j(0, ax, Policy());
    return j0_asymptotic(ax, phase0(ax));
}

double bessel_j1(double x) {
    require_finite(x, "bessel_j1");
    const double ax = std::fabs(x);
    const double value = ax < kAsymptoticLimit ? boost::math::cyl_bessel_j(1, ax, Policy())
                                               : j1_asymptotic(ax, phase0(ax));
    return x < 0.0 ? -value : value;
}

BesselPair bessel_j01(double x) {
    require_finite(x, "bessel_j01");
    const double ax = std::fabs(x);
    BesselPair out;
    if (ax < kAsymptoticLimit) {
        out = {boost::math::cyl_bessel_j(0, ax, Policy()), boost::math::cyl_bessel_j(1, ax, Policy())};
    } else {
        const Phase ph = phase0(ax);
        out = {j0_asymptotic(ax, ph), j1_asymptotic(ax, ph)};
    }
    if (x < 0.0) out.j1 = -out.j1;
    return out;
}

double bessel_y0(double x) {
    require_finite(x, "bessel_y0");
    if (x <= 0.0) throw DomainError("bessel_y0: argument must be positive");
    if (x < kAsymptoticLimit) return boost::math::cyl_neumann(0, x, Policy());
    const auto [p, q] = hankel_pq(x, 0.0);
    const Phase ph = phase0(x);
    return amplitude(x) * (p * ph.sw0 + q * ph.cw0);
}

double bessel_modulus0(double x) {
    require_finite(x, "bessel_modulus0");
    if (x <= 0.0) throw DomainError("bessel_modulus0: argument must be positive");
    if (x >= kAsymptoticLimit) {
        const auto [p, q] = hankel_pq(x, 0.0);
        return amplitude(x) * std::hypot(p, q);
    }
    return std::hypot(bessel_j0(x), bessel_y0(x));
}

}  // namespace dilatox::numkit
