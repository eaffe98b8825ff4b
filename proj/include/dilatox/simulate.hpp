#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dilatox/ikeda.hpp"
#include "dilatox/models.hpp"
#include "dilatox/numkit/grid.hpp"

namespace dilatox::simulate {

using models::State;

struct EnsembleSpec {
    models::MapSpec map;
    models::NoiseSpec noise = models::NoNoise{};
    std::size_t chains = 1;
    std::size_t steps = 10000;   ///< iterations per chain, burn-in included
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    std::uint64_t seed = 0;
    std::optional<State> x0;     ///< zero state when absent

    void validate() const;
    /// Samples kept per chain: ceil((steps - burn_in) / thin).
    std::size_t samples_per_chain() const noexcept;
};

/// Post-burn-in thinned states, chain 0 first. Chain c draws from
/// Rng::stream(seed, c), so the result does not depend on the thread count.
/// DivergenceError messages name the chain and step.
std::vector<State> run_samples(const EnsembleSpec& spec);

struct RadialHistogram {
    double lo = 0.0;
    double width = 1.0;
    std::vector<double> density;  ///< per unit r; sum(density) * width = 1
};

struct Histogram2D {
    numkit::Grid centers;          ///< bin centers; bins extend half a step around each
    std::vector<double> density;   ///< count / (N * bin area), row-major like the grid
    double outside = 0.0;          ///< fraction of samples outside every bin
};

struct SummaryOptions {
    std::optional<State> center;                ///< radial center; origin when absent
    std::optional<std::size_t> radial_bins;     ///< Freedman-Diaconis when absent
    std::optional<numkit::Grid> histogram2d;    ///< 2D histogram bin centers (2D states only)
    std::optional<numkit::Grid> charfn_grid;    ///< U grid for the empirical CF
};

struct EmpiricalSummary {
    std::size_t count = 0;
    std::size_t dim = 0;
    std::vector<double> mean;
    std::vector<double> variance;   ///< per component, divisor N - 1
    State center = State(std::size_t{1});
    RadialHistogram radial;
    std::optional<Histogram2D> histogram2d;
    std::optional<numkit::ComplexGridFunction> charfn;
    std::vector<double> radii_sorted;  ///< |X - center| ascending; the radial CDF
};

EmpiricalSummary summarize(std::span<const State> samples, const SummaryOptions& options = {});

/// run_samples followed by summarize.
EmpiricalSummary run_ensemble(const EnsembleSpec& spec, const SummaryOptions& options = {});

inline constexpr std::size_t kMinCharfnSamples = 1000;

/// (1/N) sum_j exp(-i <X_j, U>) on the grid; exactly 1 at U = 0.
/// DomainError for fewer than kMinCharfnSamples samples or mismatched dimension.
numkit::ComplexGridFunction empirical_charfn(std::span<const State> samples, const numkit::Grid& ugrid);

/// Freedman-Diaconis bin width 2 IQR N^{-1/3} (sorted input).
double freedman_diaconis_width(std::span<const double> sorted);

/// sup |F_a - F_b| for two sorted samples.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sup |F_n - F| for a sorted sample against a radial CDF.
double ks_against(std::span<const double> sorted, const ikeda::RadialDensity& reference);

/// Two-sample KS critical value at the 1% level.
double ks_critical_99(std::size_t n, std::size_t m);

/// sum over bins |p(center) - h| * area + outside fraction. Grids must coincide.
double l1_distance(const numkit::RealGridFunction& density, const Histogram2D& hist);

/// max |a - b| over a shared grid.
double cf_sup_distance(const numkit::ComplexGridFunction& a, const numkit::ComplexGridFunction& b);

struct Metrics {
    std::optional<double> cf_sup;
    std::optional<double> ks;
    std::optional<double> l1;
};

struct AnalyticTarget {
    std::optional<numkit::ComplexGridFunction> charfn;
    std::optional<ikeda::RadialDensity> radial;
    std::optional<numkit::RealGridFunction> density2d;
};

/// Every metric both sides support. DomainError when nothing is comparable or grids differ.
Metrics compare(const AnalyticTarget& analytic, const EmpiricalSummary& empirical);
Metrics compare(const EmpiricalSummary& a, const EmpiricalSummary& b);

/// Raw samples: magic "DLTX0001", u64 count (little endian), then the
/// components of each sample as little-endian float64.
void write_samples_binary(const std::string& path, std::span<const State> samples);
std::vector<double> read_samples_binary(const std::string& path, std::uint64_t* count = nullptr);

}  // namespace dilatox::simulate
