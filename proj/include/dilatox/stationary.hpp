#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dilatox/models.hpp"
#include "dilatox/numkit/grid.hpp"
#include "dilatox/numkit/product.hpp"

namespace dilatox::stationary {

using numkit::ComplexGridFunction;
using numkit::Grid;
using numkit::ProductTruncation;
using numkit::RealGridFunction;

/// F(X) = A + kappa X, no noise: P_st = delta(X - A/(1-kappa)).
struct LinearDetModel {
    models::State A;
    double kappa = 0.5;
};

/// F(X) = A + kappa X with Gaussian noise of width parameter R.
struct LinearGaussModel {
    models::State A;
    double kappa = 0.5;
    double R = 0.1;
};

/// F(X) = kappa X with Gaussian (R >= 0) plus Kubo-Andersen noise.
struct GaussKaModel {
    double kappa = 0.5;
    double R = 0.0;
    models::KuboAndersen ka;
};

using StationaryModel = std::variant<LinearDetModel, LinearGaussModel, GaussKaModel>;

void validate(const StationaryModel& model);
std::size_t model_dim(const StationaryModel& model);
std::string model_name(const StationaryModel& model);

/// Characteristic function samples together with per-point truncation diagnostics.
struct CharFnResult {
    Grid grid;
    std::vector<std::complex<double>> values;
    std::vector<std::size_t> terms_used;  ///< 0 for closed-form models
    std::vector<bool> truncated;          ///< true where max_terms was hit first
    std::size_t flagged = 0;

    /// Stationary mean A/(1-kappa) (fixed point for the deterministic model); empty for GaussKa.
    std::vector<double> mean;
    /// Per-component stationary variance R/(2(1-kappa^2)); empty when no closed form.
    std::vector<double> variance;

    ComplexGridFunction as_grid_function() const;
};

/// Psi_st at a single frequency point U; writes truncation info when requested.
std::complex<double> charfn_at(const StationaryModel& model, std::span<const double> U,
                               const ProductTruncation& trunc,
                               numkit::ProductResult<std::complex<double>>* report = nullptr);

/// Multiplier g(U) of the dilatation equation Psi(U) = g(U) Psi(kappa U).
std::complex<double> dilatation_factor(const StationaryModel& model, std::span<const double> U);

CharFnResult charfn(const StationaryModel& model, const Grid& grid,
                    const ProductTruncation& trunc = {});

CharFnResult charfn_linear_det(const models::State& A, double kappa, const Grid& grid);
CharFnResult charfn_linear_gauss(const models::State& A, double kappa, double R, const Grid& grid);
CharFnResult charfn_gauss_ka(double kappa, double R, const models::KuboAndersen& ka,
                             const Grid& grid, const ProductTruncation& trunc = {});

/// A/(1-kappa): the support of the deterministic stationary law.
models::State fixed_point(const models::State& A, double kappa);

/// max over the grid of |Psi(U) - g(U) Psi(kappa U)|, Psi(kappa U) re-evaluated directly.
double functional_residual_max(const StationaryModel& model, const Grid& grid,
                               const ProductTruncation& trunc = {});

struct DensityResult {
    RealGridFunction density;
    double mass = 0.0;            ///< trapezoid integral over the x grid
    double boundary_max = 0.0;    ///< max |Psi| on the frequency-grid boundary
    bool boundary_decay_ok = true;
    std::string warning;
};

/// Discrete inverse Fourier transform with trapezoidal weights, no windowing:
/// P(X) = (2 pi)^{-d} sum_U w(U) Psi(U) exp(i <X,U>).
/// The frequency grid must be uniform and symmetric (DomainError otherwise);
/// |Psi| >= 1e-8 on its boundary is reported through boundary_decay_ok/warning.
DensityResult density_from_charfn(const CharFnResult& cf, const Grid& xgrid);

/// Boundary |Psi| threshold below which the inversion is trusted.
inline constexpr double kBoundaryDecay = 1e-8;

}  // namespace dilatox::stationary
