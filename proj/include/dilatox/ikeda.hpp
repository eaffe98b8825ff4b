#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dilatox/numkit/grid.hpp"
#include "dilatox/numkit/product.hpp"

namespace dilatox::ikeda {

using numkit::ProductTruncation;

/// Xi(beta) = prod_{k>=0} J0(beta kappa^k).
double xi(double kappa, double beta, const ProductTruncation& trunc = {},
          numkit::ProductResult<double>* report = nullptr);

/// Xi with a cache of samples on a beta grid.
class XiFunction {
public:
    explicit XiFunction(double kappa, ProductTruncation trunc = {});

    double kappa() const noexcept { return kappa_; }
    const ProductTruncation& truncation() const noexcept { return trunc_; }

    double operator()(double beta) const { return xi(kappa_, beta, trunc_); }

    /// Evaluates and caches Xi at every beta (parallel, order preserved).
    void sample(std::span<const double> betas);
    const std::vector<double>& betas() const noexcept { return betas_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t flagged() const noexcept { return flagged_; }

    /// max over cached beta of |Xi(beta) - J0(beta) Xi(kappa beta)|.
    double recursion_residual_max() const;

private:
    double kappa_;
    ProductTruncation trunc_;
    std::vector<double> betas_;
    std::vector<double> values_;
    std::size_t flagged_ = 0;
};

/// Radial density of |X - 1| in the plane.
struct RadialDensity {
    double kappa = 0.0;
    std::vector<double> r;
    std::vector<double> density;  ///< raw quadrature values, may dip below zero
    std::vector<double> cdf;      ///< probability of |X - 1| <= r
    double mass = 0.0;            ///< trapezoid integral of density * 2 pi r over the r grid
    double min_unclipped = 0.0;   ///< smallest raw density value
    double beta_max = 0.0;        ///< upper Hankel limit reached by doubling
    std::size_t nodes = 0;        ///< quadrature nodes in [0, beta_max]

    /// Density with negative values replaced by zero.
    std::vector<double> clipped() const;
    /// CDF at an arbitrary radius: linear interpolation, clamped to [0, 1] and
    /// held constant beyond the grid.
    double cdf_at(double radius) const;
    /// Raw density at an arbitrary radius by linear interpolation; zero beyond the grid.
    double density_at(double radius) const;
};

struct HankelOptions {
    double quad_tol = 1e-6;
    double beta_start = 16.0;
    double beta_cap = 4194304.0;  ///< 2^22; exceeding it is a NumericalError
    std::size_t max_panel_depth = 8;
};

/// P_ch(r) = (2 pi kappa^2)^{-1} int_0^inf beta Xi(beta) J0(beta r / kappa) d beta and
/// its CDF int_0^inf Xi(beta) (r/kappa) J1(beta r/kappa) d beta.
///
/// Shared Gauss-Kronrod panels over [0, B]; B doubles from beta_start until
/// the contribution of [B, 2B] is below quad_tol at every r, for both the
/// density and the CDF.
RadialDensity p_ch(double kappa, std::span<const double> rgrid, const ProductTruncation& trunc = {},
                   const HankelOptions& options = {});

/// Radially symmetric stationary density of the noisy Ikeda map in the random
/// phase approximation: P_ch convolved with the Gaussian of width parameter
/// R / (1 - kappa^2), as a function of |X - 1|. Uses the convolution theorem:
/// the integrand of P_ch is multiplied by exp(-R' beta^2 / (4 kappa^2)).
RadialDensity p_st_radial(double kappa, double R, std::span<const double> rgrid,
                          const ProductTruncation& trunc = {}, const HankelOptions& options = {});

struct PStOptions {
    ProductTruncation trunc{};
    HankelOptions hankel{};
    std::size_t radial_points = 4001;  ///< resolution of the interpolation table in r
};

struct PStResult {
    numkit::RealGridFunction density;
    double mass = 0.0;       ///< sum of density times cell area
    double gaussian_std = 0.0;
    double min_unclipped = 0.0;
};

/// 2D stationary density on a uniform (x, y) grid, centered at X = 1 + 0i.
/// Throws DomainError when R <= 0 or either grid step exceeds one third of
/// the Gaussian standard deviation sqrt(R' / 2).
PStResult p_st_ikeda(double kappa, double R, const numkit::Grid& xygrid, const PStOptions& options = {});

/// Same density by direct separable convolution of P_ch cell masses with the
/// cell-integrated Gaussian on the grid. P_ch cell masses are sampled with
/// `subsamples` points per axis and cell. Slower; kept as an independent route.
/// Second order in the grid step: the cell discretization smooths by about h^2/12
/// per axis, so it agrees with p_st_ikeda to O(h^2), not to quadrature tolerance.
PStResult p_st_ikeda_direct(double kappa, double R, const numkit::Grid& xygrid,
                            const PStOptions& options = {}, std::size_t subsamples = 8);

struct EnvelopeSplit {
    double chi;           ///< M0(x) / sqrt 2
    double phase_factor;  ///< sqrt 2 cos(x - pi/4)
};

/// J0(x) ~ chi(x) * phase_factor(x) with M0 the Bessel modulus. DomainError for x < x_min.
EnvelopeSplit j0_envelope_split(double x, double x_min = 0.5);

/// Attractor radius kappa / (1 - kappa) bounding |X - 1| in the noise-free limit.
double attractor_radius(double kappa);

}  // namespace dilatox::ikeda
