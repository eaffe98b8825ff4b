#pragma once

namespace dilatox::numkit {

/// Bessel function of the first kind, order zero. Absolute error below 1e-14 on |x| <= 50.
///
/// Boost.Math rational approximations below |x| = 25, the Hankel asymptotic
/// expansion beyond. Throws DomainError for non-finite x.
double bessel_j0(double x);

/// Order one; same regimes as bessel_j0.
double bessel_j1(double x);

struct BesselPair {
    double j0;
    double j1;
};

/// J0 and J1 together, sharing one sine/cosine evaluation in the asymptotic regime.
BesselPair bessel_j01(double x);

/// Bessel function of the second kind, order zero. Requires x > 0.
double bessel_y0(double x);

/// Modulus sqrt(J0^2 + Y0^2), monotone decreasing on (0, inf). Requires x > 0.
double bessel_modulus0(double x);

}  // namespace dilatox::numkit
