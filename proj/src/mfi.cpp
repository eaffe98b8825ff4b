#include "dilatox/mfi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dilatox/error.hpp"
#include "dilatox/numkit/parallel.hpp"
#include "dilatox/numkit/quadrature.hpp"

namespace dilatox::mfi {
namespace {

constexpr double kNormalizationTol = 1e-12;
constexpr std::size_t kTopLevelBlocks = 256;

void check_kappa(double kappa, const char* who) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        std::ostringstream msg;
        msg << who << ": kappa must satisfy 0 < kappa < 1, got " << kappa;
        throw DomainError(msg.str());
    }
}

cplx weight_sum(const std::vector<cplx>& w) { return std::accumulate(w.begin(), w.end(), cplx{}); }

// Branching tree of generation n; steps along x (and optionally y) per depth and branch.
struct Tree {
    std::size_t branches = 0;
    std::size_t depth = 0;
    std::vector<cplx> scaled_weights;  // psi_k / L
    std::vector<double> step_x;        // (1 - kappa_x) kappa_x^d Lbar_k at [d * L + k]
    std::vector<double> step_y;
    double root_x = 0.0;
    double root_y = 0.0;
};

std::vector<double> branch_steps(const std::vector<double>& shifted, double kappa, std::size_t n) {
    std::vector<double> steps(n * shifted.size());
    double scale = 1.0 - kappa;
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t k = 0; k < shifted.size(); ++k) steps[d * shifted.size() + k] = scale * shifted[k];
        scale *= kappa;
    }
    return steps;
}

Tree make_tree(const FractalSpec& spec, std::size_t n, double kappa_y = 0.0) {
    Tree t;
    t.branches = spec.branches();
    t.depth = n;
    const double L = static_cast<double>(t.branches);
    for (const auto& psi : spec.weights()) t.scaled_weights.push_back(psi / L);
    t.step_x = branch_steps(spec.shifted_levels(), spec.kappa(), n);
    if (kappa_y > 0.0) {
        t.step_y = branch_steps(spec.shifted_levels(), kappa_y, n);
    } else {
        t.step_y.assign(t.step_x.size(), 0.0);
    }
    t.root_x = spec.lambda_star();
    t.root_y = spec.lambda_star();
    return t;
}

template <class Leaf>
cplx walk(const Tree& t, std::size_t depth, double x, double y, const Leaf& leaf) {
    if (depth == t.depth) return leaf(x, y);
    cplx sum{};
    const std::size_t base = depth * t.branches;
    for (std::size_t k = 0; k < t.branches; ++k) {
        sum += t.scaled_weights[k] * walk(t, depth + 1, x + t.step_x[base + k], y + t.step_y[base + k], leaf);
    }
    return sum;
}

// Sum over all leaves of prod(psi/L) * leaf(x, y). The split into top-level
// blocks depends only on (L, n); partials are reduced pairwise in block order.
template <class Leaf>
cplx tree_sum(const Tree& t, const Leaf& leaf) {
    std::size_t split = 0;
    std::size_t blocks = 1;
    while (split < t.depth && blocks < kTopLevelBlocks) {
        blocks *= t.branches;
        ++split;
    }
    std::vector<cplx> partial(blocks);
    numkit::parallel_for(blocks, [&](std::size_t b) {
        // Decode the block index into its top `split` branch choices, most significant first.
        std::size_t code = b;
        std::size_t divisor = blocks;
        double x = t.root_x;
        double y = t.root_y;
        cplx w{1.0, 0.0};
        for (std::size_t d = 0; d < split; ++d) {
            divisor /= t.branches;
            const std::size_t k = code / divisor;
            code %= divisor;
            x += t.step_x[d * t.branches + k];
            y += t.step_y[d * t.branches + k];
            w *= t.scaled_weights[k];
        }
        partial[b] = w * walk(t, split, x, y, leaf);
    });
    return numkit::pairwise_sum(std::span<const cplx>(partial));
}

void check_generation_size(std::size_t L, std::size_t n, std::size_t cap) {
    double count = 1.0;
    for (std::size_t i = 0; i < n; ++i) count *= static_cast<double>(L);
    if (count > static_cast<double>(cap)) {
        std::ostringstream msg;
        msg << "prefractal: L^n = " << count << " exceeds the materialization cap " << cap
            << "; stream with for_each_point";
        throw DomainError(msg.str());
    }
}

void check_options(const MfiOptions& o) {
    if (!(o.tol > 0.0)) throw DomainError("mfi: tol must be positive");
    if (o.derivative_bound && !(*o.derivative_bound > 0.0)) {
        throw DomainError("mfi: derivative bound M must be positive");
    }
}

// Shared convergence loop over sigma_0, sigma_1, ...
template <class SigmaAt>
MfiResult converge(const FractalSpec& spec, const MfiOptions& options, SigmaAt&& sigma_at) {
    check_options(options);
    MfiResult out;
    out.normalization_defect = spec.normalization_defect();
    const double G = weight_bound(spec).g;
    cplx previous = sigma_at(0);
    out.trace.push_back({0, previous, std::numeric_limits<double>::quiet_NaN(), std::nullopt});
    out.value = previous;
    for (std::size_t n = 1; n <= options.n_max; ++n) {
        const cplx current = sigma_at(n);
        const double gap = std::abs(current - previous);
        std::optional<double> bound;
        if (options.derivative_bound) {
            bound = theorem2_bound(*options.derivative_bound, G, spec.kappa(), n);
        }
        out.trace.push_back({n, current, gap, bound});
        out.value = current;
        out.n_final = n;
        out.cauchy_gap = gap;
        out.bound_theorem2 = bound;
        previous = current;
        if (gap < options.tol && (!bound || *bound < options.tol)) {
            out.converged = true;
            break;
        }
    }
    return out;
}

void require_binary_symmetric(const FractalSpec& spec, const char* who) {
    if (!spec.is_binary_symmetric()) {
        throw DomainError(std::string(who) +
                          ": requires L = 2, levels {0, 1} and lambda* = 1/2");
    }
}

}  // namespace

// ---- FractalSpec ----

FractalSpec::FractalSpec(std::vector<double> levels, double kappa, double lambda_star,
                         std::vector<cplx> weights, WeightCheck check)
    : levels_(std::move(levels)),
      weights_(std::move(weights)),
      kappa_(kappa),
      lambda_star_(lambda_star),
      check_(check) {
    if (levels_.size() < 2) throw DomainError("FractalSpec: L must be >= 2");
    check_kappa(kappa_, "FractalSpec");
    if (!(lambda_star_ > 0.0 && lambda_star_ < 1.0)) {
        throw DomainError("FractalSpec: lambda* must lie in (0, 1)");
    }
    if (levels_.front() != 0.0 || levels_.back() != 1.0) {
        throw DomainError("FractalSpec: levels must start at 0 and end at 1");
    }
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        if (!(levels_[k] > levels_[k - 1])) {
            throw DomainError("FractalSpec: levels must be strictly increasing");
        }
    }
    if (weights_.size() != levels_.size()) {
        throw DomainError("FractalSpec: need one weight per level");
    }
    for (const auto& w : weights_) {
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
            throw DomainError("FractalSpec: weights must be finite");
        }
    }
    for (double level : levels_) shifted_.push_back(level - lambda_star_);
    if (check_ == WeightCheck::kEnforced && normalization_defect() > kNormalizationTol) {
        std::ostringstream msg;
        msg.precision(17);
        const cplx s = weight_sum(weights_);
        msg << "FractalSpec: weights must satisfy sum psi = L = " << levels_.size()
            << " within 1e-12, got (" << s.real() << ", " << s.imag()
            << "); use unchecked mode to accept them";
        throw DomainError(msg.str());
    }
}

FractalSpec FractalSpec::cantor(double kappa) { return binary(kappa, 1.0, 1.0); }

FractalSpec FractalSpec::binary(double kappa, cplx psi0, cplx psi1, WeightCheck check) {
    return FractalSpec({0.0, 1.0}, kappa, 0.5, {psi0, psi1}, check);
}

FractalSpec FractalSpec::ikeda_weights(double kappa) {
    std::vector<cplx> psi;
    for (double shifted : {-0.5, 0.5}) {
        psi.push_back(std::numbers::sqrt2 * std::polar(1.0, -0.25 * std::numbers::pi * shifted));
    }
    return FractalSpec({0.0, 1.0}, kappa, 0.5, std::move(psi), WeightCheck::kUnchecked);
}

double FractalSpec::normalization_defect() const noexcept {
    return std::abs(weight_sum(weights_) - cplx(static_cast<double>(levels_.size()), 0.0));
}

FractalSpec FractalSpec::with_kappa(double kappa) const {
    return FractalSpec(levels_, kappa, lambda_star_, weights_, check_);
}

bool FractalSpec::is_binary_symmetric() const noexcept {
    return levels_.size() == 2 && lambda_star_ == 0.5;
}

// ---- pre-fractal ----

void for_each_point(const FractalSpec& spec, std::size_t n,
                    const std::function<void(const WeightedPoint&)>& visit) {
    const std::size_t L = spec.branches();
    const auto steps = branch_steps(spec.shifted_levels(), spec.kappa(), n);
    const auto& psi = spec.weights();
    auto recurse = [&](auto&& self, std::size_t depth, double x, cplx theta) -> void {
        if (depth == n) {
            visit({x, theta});
            return;
        }
        for (std::size_t k = 0; k < L; ++k) {
            self(self, depth + 1, x + steps[depth * L + k], theta * psi[k]);
        }
    };
    recurse(recurse, 0, spec.lambda_star(), cplx{1.0, 0.0});
}

WeightedPointSet prefractal(const FractalSpec& spec, std::size_t n, std::size_t cap) {
    check_generation_size(spec.branches(), n, cap);
    WeightedPointSet out;
    out.generation = n;
    out.points.reserve(static_cast<std::size_t>(std::pow(spec.branches(), n)));
    for_each_point(spec, n, [&](const WeightedPoint& p) { out.points.push_back(p); });
    return out;
}

// ---- sigma_n and convergence ----

cplx sigma(const FractalSpec& spec, const Function1D& f, std::size_t n) {
    const Tree t = make_tree(spec, n);
    return tree_sum(t, [&f](double x, double) { return f(x); });
}

MfiResult mfi_eval(const FractalSpec& spec, const Function1D& f, const MfiOptions& options) {
    return converge(spec, options, [&](std::size_t n) { return sigma(spec, f, n); });
}

WeightBound weight_bound(const FractalSpec& spec) noexcept {
    double total = 0.0;
    for (const auto& w : spec.weights()) total += std::abs(w);
    const double g1 = total / static_cast<double>(spec.branches());
    return {g1, std::max(g1, 1.0)};
}

double theorem2_bound(double M, double G, double kappa, std::size_t n) {
    if (!(M > 0.0)) throw DomainError("theorem2_bound: M must be positive");
    if (!(G >= 1.0)) throw DomainError("theorem2_bound: G must be >= 1");
    check_kappa(kappa, "theorem2_bound");
    return 2.0 * M * std::exp(G) * std::expm1(G * std::pow(kappa, static_cast<double>(n)));
}

double sigma_magnitude_bound(double M, double G) { return M * std::exp(G); }

// ---- Fourier side ----

cplx measure_charfn_factor(const FractalSpec& spec, cplx omega, std::size_t gamma) {
    const double scale = (1.0 - spec.kappa()) * std::pow(spec.kappa(), static_cast<double>(gamma));
    cplx sum{};
    const auto& shifted = spec.shifted_levels();
    for (std::size_t k = 0; k < shifted.size(); ++k) {
        sum += spec.weights()[k] * std::exp(cplx(0.0, -1.0) * omega * (scale * shifted[k]));
    }
    return sum / static_cast<double>(spec.branches());
}

numkit::ProductResult<cplx> measure_charfn_at(const FractalSpec& spec, cplx omega,
                                              const numkit::ProductTruncation& trunc) {
    double spread = 0.0;
    for (double s : spec.shifted_levels()) spread = std::max(spread, std::fabs(s));
    const std::size_t first =
        numkit::shrink_index(std::abs(omega) * (1.0 - spec.kappa()) * spread, spec.kappa());
    auto product = numkit::truncated_product(
        [&](std::size_t gamma) { return measure_charfn_factor(spec, omega, gamma); }, trunc, first);
    product.value *= std::exp(cplx(0.0, -1.0) * omega * spec.lambda_star());
    return product;
}

cplx measure_dilatation_factor(const FractalSpec& spec, cplx omega) {
    cplx sum{};
    const auto& shifted = spec.shifted_levels();
    const double c = 1.0 - spec.kappa();
    for (std::size_t k = 0; k < shifted.size(); ++k) {
        sum += spec.weights()[k] *
               std::exp(cplx(0.0, -1.0) * omega * (c * (spec.lambda_star() + shifted[k])));
    }
    return sum / static_cast<double>(spec.branches());
}

MeasureCharFn measure_charfn(const FractalSpec& spec, const numkit::Grid& omega_grid,
                             const numkit::ProductTruncation& trunc) {
    if (omega_grid.dim() != 1) throw DomainError("measure_charfn: omega grid must be 1D");
    MeasureCharFn out;
    out.values = numkit::ComplexGridFunction(omega_grid);
    out.terms_used.assign(omega_grid.size(), 0);
    std::vector<char> flags(omega_grid.size(), 0);
    numkit::parallel_for(omega_grid.size(), [&](std::size_t i) {
        const auto r = measure_charfn_at(spec, omega_grid.axis(0)[i], trunc);
        out.values.values[i] = r.value;
        out.terms_used[i] = r.terms_used;
        flags[i] = r.converged ? 0 : 1;
    });
    out.flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
    return out;
}

cplx fourier_pairing_exp(const FractalSpec& spec, double omega,
                         const numkit::ProductTruncation& trunc) {
    const auto r = measure_charfn_at(spec, -omega, trunc);
    if (!r.converged) throw NumericalError("fourier_pairing_exp: product did not converge");
    return r.value;
}

cplx fourier_moment(const FractalSpec& spec, unsigned k, const numkit::ProductTruncation& trunc,
                    double radius, std::size_t nodes) {
    if (!(radius > 0.0) || nodes <= k) throw DomainError("fourier_moment: bad contour");
    cplx coeff{};
    for (std::size_t j = 0; j < nodes; ++j) {
        const cplx z = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(j) /
                                              static_cast<double>(nodes));
        const auto r = measure_charfn_at(spec, z, trunc);
        if (!r.converged) throw NumericalError("fourier_moment: product did not converge");
        coeff += r.value * std::pow(z, -static_cast<int>(k));
    }
    coeff /= static_cast<double>(nodes);
    double factorial = 1.0;
    for (unsigned i = 2; i <= k; ++i) factorial *= i;
    return factorial * std::pow(cplx(0.0, 1.0), static_cast<int>(k)) * coeff;
}

// ---- integral-average definitions ----

MfiResult mfi_box_eval(const FractalSpec& spec, const Function1D& f, const MfiOptions& options) {
    require_binary_symmetric(spec, "mfi_box_eval");
    if (!(spec.kappa() < 0.5)) {
        throw DomainError(
            "mfi_box_eval: segments intersect for kappa >= 1/2; use mfi_2d_eval with kappa_y = 1/2");
    }
    auto sigma_box = [&](std::size_t n) {
        const double width = std::pow(spec.kappa(), static_cast<double>(n));
        const double avg_tol = options.tol / std::pow(2.0, static_cast<double>(n));
        const Tree t = make_tree(spec, n);
        return tree_sum(t, [&](double x, double) {
            // Divide by the representable cell length, not the nominal width.
            const double a = x - 0.5 * width;
            const double b = x + 0.5 * width;
            const auto q = numkit::integrate(f, a, b, avg_tol * width);
            if (!q.converged) throw NumericalError("mfi_box_eval: cell quadrature did not converge");
            return q.value / (b - a);
        });
    };
    return converge(spec, options, sigma_box);
}

MfiResult mfi_2d_eval(const FractalSpec& spec, double kappa_x, double kappa_y, const Function2D& f,
                      const MfiOptions& options) {
    require_binary_symmetric(spec, "mfi_2d_eval");
    check_kappa(kappa_x, "mfi_2d_eval");
    check_kappa(kappa_y, "mfi_2d_eval");
    if (std::min(kappa_x, kappa_y) > 0.5) {
        throw DomainError("mfi_2d_eval: cells overlap unless min(kappa_x, kappa_y) <= 1/2");
    }
    const FractalSpec xspec = spec.with_kappa(kappa_x);
    auto sigma_2d = [&](std::size_t n) {
        const double hx = std::pow(kappa_x, static_cast<double>(n));
        const double hy = std::pow(kappa_y, static_cast<double>(n));
        const double avg_tol = options.tol / std::pow(2.0, static_cast<double>(n));
        const Tree t = make_tree(xspec, n, kappa_y);
        return tree_sum(t, [&](double x, double y) {
            const double ya = y - 0.5 * hy;
            const double yb = y + 0.5 * hy;
            const double xa = x - 0.5 * hx;
            const double xb = x + 0.5 * hx;
            auto inner = [&](double xv) {
                const auto q = numkit::integrate([&](double yv) { return f(xv, yv); }, ya, yb, 0.5 * avg_tol * hy);
                if (!q.converged) throw NumericalError("mfi_2d_eval: cell quadrature did not converge");
                return q.value;
            };
            const auto q = numkit::integrate(inner, xa, xb, 0.5 * avg_tol * hx * hy);
            if (!q.converged) throw NumericalError("mfi_2d_eval: cell quadrature did not converge");
            return q.value / ((xb - xa) * (yb - ya));
        });
    };
    return converge(xspec, options, sigma_2d);
}

Dimensions dimensions(double kappa_x, double kappa_y) {
    check_kappa(kappa_x, "dimensions");
    check_kappa(kappa_y, "dimensions");
    Dimensions d;
    if (kappa_x <= 0.5) d.d_x = -1.0 / std::log2(kappa_x);
    if (kappa_y <= 0.5) d.d_y = -1.0 / std::log2(kappa_y);
    d.d = 2.0 / (1.0 - std::log2(kappa_x));
    return d;
}

double box_counting_dimension(std::span<const double> points, std::span<const double> box_sizes) {
    if (points.empty() || box_sizes.size() < 2) {
        throw DomainError("box_counting_dimension: needs points and at least two box sizes");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<long long> cells(points.size());
    for (double eps : box_sizes) {
        if (!(eps > 0.0)) throw DomainError("box_counting_dimension: box sizes must be positive");
        for (std::size_t i = 0; i < points.size(); ++i) {
            cells[i] = static_cast<long long>(std::floor(points[i] / eps));
        }
        std::sort(cells.begin(), cells.end());
        const auto occupied = std::unique(cells.begin(), cells.end()) - cells.begin();
        xs.push_back(std::log(1.0 / eps));
        ys.push_back(std::log(static_cast<double>(occupied)));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

numkit::ComplexGridFunction singular_measure_approx(const FractalSpec& spec, std::size_t n,
                                                   const numkit::Grid& xgrid, double width) {
    if (!(width > 0.0)) throw DomainError("singular_measure_approx: width must be positive");
    if (xgrid.dim() != 1) throw DomainError("singular_measure_approx: x grid must be 1D");
    const auto set = prefractal(spec, n);
    const numkit::Axis& axis = xgrid.axis(0);
    const double h = axis.step();
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * width);
    const double scale = std::pow(static_cast<double>(spec.branches()), -static_cast<double>(n));
    const double reach = 12.0 * width;
    numkit::ComplexGridFunction out(xgrid);
    for (const auto& p : set.points) {
        const cplx w = p.theta * scale;
        const double lo = std::max(0.0, std::ceil((p.lambda - reach - axis.lo) / h));
        const double hi = std::min(static_cast<double>(axis.count - 1),
                                   std::floor((p.lambda + reach - axis.lo) / h));
        for (auto i = static_cast<std::size_t>(lo); static_cast<double>(i) <= hi; ++i) {
            const double z = (axis[i] - p.lambda) / width;
            out.values[i] += w * (norm * std::exp(-0.5 * z * z));
        }
    }
    return out;
}

}  // namespace dilatox::mfi
