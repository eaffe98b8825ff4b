#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dilatox/numkit/grid.hpp"
#include "dilatox/numkit/product.hpp"

namespace dilatox::mfi {

using cplx = std::complex<double>;
using Function1D = std::function<cplx(double)>;
using Function2D = std::function<cplx(double, double)>;

enum class WeightCheck {
    kEnforced,   ///< sum psi must equal L within 1e-12
    kUnchecked,  ///< any weights accepted; the defect |sum psi - L| is reported
};

/// Branching law of an L-branch Cantor-type fractal with complex weights.
///
/// Level k maps to the shifted level Lbar_k = Lambda_k - lambda*. Generation n
/// points are lambda* + (1 - kappa) * sum_i s_i kappa^{i-1} with s_i drawn from
/// the shifted levels, weighted by prod_i psi(s_i).
class FractalSpec {
public:
    FractalSpec(std::vector<double> levels, double kappa, double lambda_star,
                std::vector<cplx> weights, WeightCheck check = WeightCheck::kEnforced);

    /// L = 2, levels {0, 1}, lambda* = 1/2, psi = 1: the symmetric Cantor measure.
    static FractalSpec cantor(double kappa);
    /// L = 2, levels {0, 1}, lambda* = 1/2 with the given weights.
    static FractalSpec binary(double kappa, cplx psi0, cplx psi1,
                              WeightCheck check = WeightCheck::kEnforced);
    /// Weights psi(Lbar) = sqrt(2) exp(-i pi Lbar / 4) arising from the Ikeda
    /// random-phase construction. They sum to 2 sqrt(2) cos(pi/8) != 2, so this
    /// spec is always unchecked.
    static FractalSpec ikeda_weights(double kappa);

    std::size_t branches() const noexcept { return levels_.size(); }
    double kappa() const noexcept { return kappa_; }
    double lambda_star() const noexcept { return lambda_star_; }
    const std::vector<double>& levels() const noexcept { return levels_; }
    const std::vector<double>& shifted_levels() const noexcept { return shifted_; }
    const std::vector<cplx>& weights() const noexcept { return weights_; }
    WeightCheck check() const noexcept { return check_; }

    /// |sum psi - L|; zero to rounding for enforced specs.
    double normalization_defect() const noexcept;

    /// Same levels and weights with another contraction.
    FractalSpec with_kappa(double kappa) const;

    /// True for L = 2, levels {0, 1}, lambda* = 1/2: the setting of the box and 2D definitions.
    bool is_binary_symmetric() const noexcept;

private:
    std::vector<double> levels_;
    std::vector<double> shifted_;
    std::vector<cplx> weights_;
    double kappa_;
    double lambda_star_;
    WeightCheck check_;
};

struct WeightedPoint {
    double lambda;
    cplx theta;  ///< Theta_n^{[s]} = prod psi(s_i), not divided by L^n
};

/// Generation n of the pre-fractal, materialized. Points are in lexicographic
/// order of the signature (s_1, ..., s_n), first component most significant,
/// each component ordered by level index.
struct WeightedPointSet {
    std::size_t generation = 0;
    std::vector<WeightedPoint> points;
};

inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 24;

/// Throws DomainError when L^n exceeds `cap`; use for_each_point to stream instead.
WeightedPointSet prefractal(const FractalSpec& spec, std::size_t n,
                            std::size_t cap = kDefaultMaterializeCap);

/// Streams generation n in the same lexicographic order with O(n) memory.
void for_each_point(const FractalSpec& spec, std::size_t n,
                    const std::function<void(const WeightedPoint&)>& visit);

/// sigma_n = L^{-n} sum_s Theta_n^{[s]} f(lambda_n^{[s]}).
///
/// Depth-first over the branching tree, parallel over a fixed set of top-level
/// subtrees whose count depends only on L and n. Subtree partials are combined
/// by pairwise summation, so the value is bit-identical for any thread count.
cplx sigma(const FractalSpec& spec, const Function1D& f, std::size_t n);

struct SigmaStep {
    std::size_t n;
    cplx value;
    double gap;                  ///< |sigma_n - sigma_{n-1}|; NaN for n = 0
    std::optional<double> bound; ///< tail bound at n when M is known
};

struct MfiResult {
    cplx value;
    std::size_t n_final = 0;
    double cauchy_gap = 0.0;                  ///< last |sigma_n - sigma_{n-1}|
    std::optional<double> bound_theorem2;     ///< 2 M e^G (e^{G kappa^n} - 1) at n_final
    bool converged = false;
    double normalization_defect = 0.0;
    std::vector<SigmaStep> trace;
};

struct MfiOptions {
    double tol = 1e-10;
    std::size_t n_max = 24;
    std::optional<double> derivative_bound;  ///< M: sup |f^{(l)}| over [0,1] and all l
};

/// Evaluates sigma_0, sigma_1, ... until |sigma_n - sigma_{n-1}| < tol (and the
/// tail bound < tol when M is given) or n_max is reached (converged = false).
MfiResult mfi_eval(const FractalSpec& spec, const Function1D& f, const MfiOptions& options);

struct WeightBound {
    double g1;  ///< L^{-1} sum |psi_k|
    double g;   ///< max(g1, 1)
};

WeightBound weight_bound(const FractalSpec& spec) noexcept;

/// 2 M e^G (e^{G kappa^n} - 1): bound on |sigma_{n+k} - sigma_n| for every k >= 1.
double theorem2_bound(double M, double G, double kappa, std::size_t n);

/// |sigma_n| <= M e^G.
double sigma_magnitude_bound(double M, double G);

// ---- Fourier side ----

/// L^{-1} sum_k psi_k exp(-i omega (1 - kappa) kappa^gamma Lbar_k) for complex omega.
cplx measure_charfn_factor(const FractalSpec& spec, cplx omega, std::size_t gamma);

/// hat M(omega) = e^{-i omega lambda*} prod_gamma [factor_gamma(omega)], via truncated_product.
numkit::ProductResult<cplx> measure_charfn_at(const FractalSpec& spec, cplx omega,
                                              const numkit::ProductTruncation& trunc = {});

/// hat N(omega) = L^{-1} sum_k psi_k exp(-i omega (1 - kappa)(lambda* + Lbar_k)).
cplx measure_dilatation_factor(const FractalSpec& spec, cplx omega);

struct MeasureCharFn {
    numkit::ComplexGridFunction values;
    std::vector<std::size_t> terms_used;
    std::size_t flagged = 0;
};

MeasureCharFn measure_charfn(const FractalSpec& spec, const numkit::Grid& omega_grid,
                             const numkit::ProductTruncation& trunc = {});

/// Integral of e^{i omega x} against the measure: hat M(-omega).
cplx fourier_pairing_exp(const FractalSpec& spec, double omega,
                         const numkit::ProductTruncation& trunc = {});

/// Moment int x^k dmu = k! i^k [omega^k] hat M, coefficient taken by a Cauchy
/// integral of hat M over |omega| = radius with `nodes` trapezoid points.
cplx fourier_moment(const FractalSpec& spec, unsigned k, const numkit::ProductTruncation& trunc = {},
                    double radius = 1.0, std::size_t nodes = 64);

// ---- integral-average definitions ----

/// sigma_n^# = 2^{-n} sum_s Theta_n^{[s]} <f>_{kappa^n}, cell averages over
/// [lambda - kappa^n/2, lambda + kappa^n/2] by adaptive quadrature. Requires a
/// binary symmetric spec with kappa < 1/2; DomainError otherwise.
MfiResult mfi_box_eval(const FractalSpec& spec, const Function1D& f, const MfiOptions& options);

/// Two-dimensional definition over rectangles l_x (x) l_y with contractions
/// kappa_x, kappa_y and the weights of `spec` (binary symmetric). Requires
/// min(kappa_x, kappa_y) <= 1/2.
MfiResult mfi_2d_eval(const FractalSpec& spec, double kappa_x, double kappa_y,
                      const Function2D& f, const MfiOptions& options);

struct Dimensions {
    std::optional<double> d_x;  ///< -1/log2(kappa_x), only where kappa_x <= 1/2
    std::optional<double> d_y;
    double d;                   ///< 2 / (1 - log2 kappa_x)
};

Dimensions dimensions(double kappa_x, double kappa_y = 0.5);

/// Slope of log N(eps) against log(1/eps) by least squares, N(eps) the number of
/// occupied boxes [j eps, (j+1) eps).
double box_counting_dimension(std::span<const double> points, std::span<const double> box_sizes);

/// Weighted delta comb of generation n smoothed by a unit-mass Gaussian of std
/// `width`, sampled on xgrid. Gaussians are cut at 12 widths.
numkit::ComplexGridFunction singular_measure_approx(const FractalSpec& spec, std::size_t n,
                                                   const numkit::Grid& xgrid, double width);

}  // namespace dilatox::mfi
