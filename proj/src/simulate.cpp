#include "dilatox/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dilatox/error.hpp"
#include "dilatox/numkit/parallel.hpp"
#include "dilatox/numkit/rng.hpp"

namespace dilatox::simulate {
namespace {

constexpr char kMagic[8] = {'D', 'L', 'T', 'X', '0', '0', '0', '1'};
constexpr std::size_t kMaxRadialBins = 100000;

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw NumericalError("read_samples_binary: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

RadialHistogram radial_histogram(const std::vector<double>& sorted, std::optional<std::size_t> bins) {
    RadialHistogram h;
    const double lo = sorted.front();
    const double hi = sorted.back();
    const double range = hi - lo;
    std::size_t count = 1;
    if (range > 0.0) {
        if (bins) {
            count = *bins;
        } else {
            const double w = freedman_diaconis_width(sorted);
            count = w > 0.0 ? static_cast<std::size_t>(std::ceil(range / w)) : 1;
        }
        count = std::clamp<std::size_t>(count, 1, kMaxRadialBins);
        h.lo = lo;
        h.width = range / static_cast<double>(count);
    } else {
        h.lo = lo - 0.5;
        h.width = 1.0;
    }
    std::vector<std::size_t> tally(count, 0);
    for (double r : sorted) {
        auto k = static_cast<std::size_t>((r - h.lo) / h.width);
        tally[std::min(k, count - 1)] += 1;
    }
    const double norm = 1.0 / (static_cast<double>(sorted.size()) * h.width);
    h.density.resize(count);
    for (std::size_t k = 0; k < count; ++k) h.density[k] = static_cast<double>(tally[k]) * norm;
    return h;
}

Histogram2D histogram_2d(std::span<const State> samples, const numkit::Grid& centers) {
    if (centers.dim() != 2) throw DomainError("summarize: 2D histogram needs a two-dimensional grid");
    const numkit::Axis& ax = centers.axis(0);
    const numkit::Axis& ay = centers.axis(1);
    const double hx = ax.step();
    const double hy = ay.step();
    const double x0 = ax.lo - 0.5 * hx;
    const double y0 = ay.lo - 0.5 * hy;
    std::vector<std::size_t> tally(centers.size(), 0);
    std::size_t outside = 0;
    for (const auto& s : samples) {
        const double fx = std::floor((s[0] - x0) / hx);
        const double fy = std::floor((s[1] - y0) / hy);
        if (fx < 0.0 || fy < 0.0 || fx >= static_cast<double>(ax.count) ||
            fy >= static_cast<double>(ay.count)) {
            ++outside;
            continue;
        }
        tally[static_cast<std::size_t>(fx) * ay.count + static_cast<std::size_t>(fy)] += 1;
    }
    Histogram2D h;
    h.centers = centers;
    const double n = static_cast<double>(samples.size());
    h.density.resize(tally.size());
    for (std::size_t i = 0; i < tally.size(); ++i) h.density[i] = static_cast<double>(tally[i]) / (n * hx * hy);
    h.outside = static_cast<double>(outside) / n;
    return h;
}

void require_same_grid(const numkit::Grid& a, const numkit::Grid& b, const char* who) {
    if (!a.same_as(b)) throw DomainError(std::string(who) + ": grids do not coincide");
}

}  // namespace

void EnsembleSpec::validate() const {
    models::validate(map);
    const std::size_t dim = models::state_dim(map);
    models::validate(noise, dim);
    if (chains < 1) throw DomainError("EnsembleSpec: chains must be >= 1");
    if (thin < 1) throw DomainError("EnsembleSpec: thin must be >= 1");
    if (!(burn_in < steps)) {
        throw DomainError("EnsembleSpec: burn_in (" + std::to_string(burn_in) +
                          ") must be smaller than steps (" + std::to_string(steps) + ")");
    }
    if (x0 && x0->dim() != dim) throw DomainError("EnsembleSpec: x0 dimension does not match the map");
}

std::size_t EnsembleSpec::samples_per_chain() const noexcept {
    return (steps - burn_in + thin - 1) / thin;
}

std::vector<State> run_samples(const EnsembleSpec& spec) {
    spec.validate();
    const std::size_t dim = models::state_dim(spec.map);
    const std::size_t per_chain = spec.samples_per_chain();
    std::vector<std::vector<State>> chains(spec.chains);
    numkit::parallel_for(spec.chains, [&](std::size_t c) {
        numkit::Rng rng = numkit::Rng::stream(spec.seed, c);
        models::NoiseSampler noise(spec.noise, dim);
        std::vector<State>& out = chains[c];
        out.reserve(per_chain);
        const State x0 = spec.x0 ? *spec.x0 : State(dim);
        try {
            models::iterate_stream(spec.map, noise, x0, spec.steps, rng, [&](std::size_t step, const State& x) {
                if (step > spec.burn_in && (step - spec.burn_in - 1) % spec.thin == 0) out.push_back(x);
            });
        } catch (const DivergenceError& e) {
            std::ostringstream msg;
            msg << "run_ensemble: chain " << c << ": " << e.what();
            throw DivergenceError(msg.str(), e.step());
        }
    });
    std::vector<State> all;
    all.reserve(per_chain * spec.chains);
    for (auto& chain : chains) all.insert(all.end(), chain.begin(), chain.end());
    return all;
}

EmpiricalSummary summarize(std::span<const State> samples, const SummaryOptions& options) {
    if (samples.empty()) throw DomainError("summarize: no samples");
    EmpiricalSummary s;
    s.count = samples.size();
    s.dim = samples.front().dim();
    for (const auto& x : samples) {
        if (x.dim() != s.dim) throw DomainError("summarize: samples have mixed dimensions");
    }
    const double n = static_cast<double>(s.count);
    s.mean.assign(s.dim, 0.0);
    for (const auto& x : samples) {
        for (std::size_t i = 0; i < s.dim; ++i) s.mean[i] += x[i];
    }
    for (double& m : s.mean) m /= n;
    s.variance.assign(s.dim, 0.0);
    for (const auto& x : samples) {
        for (std::size_t i = 0; i < s.dim; ++i) {
            const double d = x[i] - s.mean[i];
            s.variance[i] += d * d;
        }
    }
    for (double& v : s.variance) v = s.count > 1 ? v / (n - 1.0) : 0.0;

    s.center = options.center ? *options.center : State(s.dim);
    if (s.center.dim() != s.dim) throw DomainError("summarize: center dimension does not match samples");
    s.radii_sorted.resize(s.count);
    for (std::size_t j = 0; j < s.count; ++j) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < s.dim; ++i) {
            const double d = samples[j][i] - s.center[i];
            r2 += d * d;
        }
        s.radii_sorted[j] = std::sqrt(r2);
    }
    std::sort(s.radii_sorted.begin(), s.radii_sorted.end());
    s.radial = radial_histogram(s.radii_sorted, options.radial_bins);

    if (options.histogram2d) {
        if (s.dim != 2) throw DomainError("summarize: 2D histogram requires two-dimensional samples");
        s.histogram2d = histogram_2d(samples, *options.histogram2d);
    }
    if (options.charfn_grid) s.charfn = empirical_charfn(samples, *options.charfn_grid);
    return s;
}

EmpiricalSummary run_ensemble(const EnsembleSpec& spec, const SummaryOptions& options) {
    const auto samples = run_samples(spec);
    return summarize(samples, options);
}

numkit::ComplexGridFunction empirical_charfn(std::span<const State> samples, const numkit::Grid& ugrid) {
    if (samples.size() < kMinCharfnSamples) {
        throw DomainError("empirical_charfn: needs at least " + std::to_string(kMinCharfnSamples) +
                          " samples, got " + std::to_string(samples.size()));
    }
    const std::size_t dim = samples.front().dim();
    if (ugrid.dim() != dim) throw DomainError("empirical_charfn: U grid dimension does not match samples");
    numkit::ComplexGridFunction out(ugrid);
    const double n = static_cast<double>(samples.size());
    numkit::parallel_for(ugrid.size(), [&](std::size_t k) {
        const auto U = ugrid.point(k);
        bool zero = true;
        for (std::size_t i = 0; i < dim; ++i) zero = zero && U[i] == 0.0;
        if (zero) {
            out.values[k] = {1.0, 0.0};
            return;
        }
        double re = 0.0;
        double im = 0.0;
        for (const auto& x : samples) {
            double phase = 0.0;
            for (std::size_t i = 0; i < dim; ++i) phase += x[i] * U[i];
            re += std::cos(phase);
            im -= std::sin(phase);
        }
        out.values[k] = {re / n, im / n};
    });
    return out;
}

double freedman_diaconis_width(std::span<const double> sorted) {
    if (sorted.size() < 2) return 0.0;
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double t = pos - static_cast<double>(i);
        return i + 1 < sorted.size() ? sorted[i] * (1.0 - t) + sorted[i + 1] * t : sorted[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    return 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(sorted.size()));
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_against(std::span<const double> sorted, const ikeda::RadialDensity& reference) {
    if (sorted.empty()) throw DomainError("ks_against: empty sample");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = reference.cdf_at(sorted[i]);
        d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    return d;
}

double ks_critical_99(std::size_t n, std::size_t m) {
    const double a = static_cast<double>(n);
    const double b = static_cast<double>(m);
    return 1.628 * std::sqrt((a + b) / (a * b));
}

double l1_distance(const numkit::RealGridFunction& density, const Histogram2D& hist) {
    require_same_grid(density.grid, hist.centers, "l1_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < hist.density.size(); ++i) s += std::fabs(density.values[i] - hist.density[i]);
    return s * density.grid.cell_volume() + hist.outside;
}

double cf_sup_distance(const numkit::ComplexGridFunction& a, const numkit::ComplexGridFunction& b) {
    require_same_grid(a.grid, b.grid, "cf_sup_distance");
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

Metrics compare(const AnalyticTarget& analytic, const EmpiricalSummary& empirical) {
    Metrics m;
    if (analytic.charfn && empirical.charfn) m.cf_sup = cf_sup_distance(*analytic.charfn, *empirical.charfn);
    if (analytic.radial) m.ks = ks_against(empirical.radii_sorted, *analytic.radial);
    if (analytic.density2d && empirical.histogram2d) {
        m.l1 = l1_distance(*analytic.density2d, *empirical.histogram2d);
    }
    if (!m.cf_sup && !m.ks && !m.l1) throw DomainError("compare: no metric is defined for these inputs");
    return m;
}

Metrics compare(const EmpiricalSummary& a, const EmpiricalSummary& b) {
    if (a.dim != b.dim) throw DomainError("compare: summaries have different dimensions");
    Metrics m;
    m.ks = ks_two_sample(a.radii_sorted, b.radii_sorted);
    if (a.charfn && b.charfn) m.cf_sup = cf_sup_distance(*a.charfn, *b.charfn);
    if (a.histogram2d && b.histogram2d) {
        const auto& ha = *a.histogram2d;
        const auto& hb = *b.histogram2d;
        require_same_grid(ha.centers, hb.centers, "compare");
        double s = 0.0;
        for (std::size_t i = 0; i < ha.density.size(); ++i) s += std::fabs(ha.density[i] - hb.density[i]);
        m.l1 = s * ha.centers.cell_volume() + std::fabs(ha.outside - hb.outside);
    }
    return m;
}

void write_samples_binary(const std::string& path, std::span<const State> samples) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericalError("write_samples_binary: cannot open " + path);
    os.write(kMagic, sizeof kMagic);
    put_u64(os, samples.size());
    for (const auto& s : samples) {
        for (double v : s.span()) put_u64(os, std::bit_cast<std::uint64_t>(v));
    }
    if (!os) throw NumericalError("write_samples_binary: write failed for " + path);
}

std::vector<double> read_samples_binary(const std::string& path, std::uint64_t* count) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw NumericalError("read_samples_binary: cannot open " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        throw NumericalError("read_samples_binary: bad magic in " + path);
    }
    const std::uint64_t n = get_u64(is);
    if (count) *count = n;
    std::vector<double> out;
    while (is.peek() != std::char_traits<char>::eof()) out.push_back(std::bit_cast<double>(get_u64(is)));
    return out;
}

}  // namespace dilatox::simulate
