#include "dilatox/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dilatox/numkit/parallel.hpp"

namespace dilatox::stationary {
namespace {

using cplx = std::complex<double>;

void check_kappa(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        std::ostringstream msg;
        msg << "stationary: kappa must satisfy 0 < kappa < 1, got " << kappa;
        throw DomainError(msg.str());
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Phase of the Kubo-Andersen factor at scale kappa^gamma.
cplx ka_factor(const models::KuboAndersen& ka, std::span<const double> U, double scale) {
    cplx sum{0.0, 0.0};
    for (std::size_t k = 0; k < ka.points.size(); ++k) {
        const double phase = scale * dot(ka.points[k].span(), U);
        sum += ka.probs[k] * cplx(std::cos(phase), -std::sin(phase));
    }
    return sum;
}

std::vector<double> trapezoid_weights(const numkit::Axis& a) {
    std::vector<double> w(a.count, a.step());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace

void validate(const StationaryModel& model) {
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            check_kappa(m.kappa);
            if constexpr (std::is_same_v<M, LinearDetModel>) {
                if (m.A.dim() == 0) throw DomainError("stationary: A must be set");
            } else if constexpr (std::is_same_v<M, LinearGaussModel>) {
                if (m.A.dim() == 0) throw DomainError("stationary: A must be set");
                if (!(m.R > 0.0)) throw DomainError("stationary: R must be positive");
            } else {
                if (!(m.R >= 0.0)) throw DomainError("stationary: R must be nonnegative");
                if (m.ka.points.empty()) throw DomainError("stationary: Kubo-Andersen points missing");
                models::validate(m.ka, m.ka.points.front().dim());
            }
        },
        model);
}

std::size_t model_dim(const StationaryModel& model) {
    if (const auto* m = std::get_if<GaussKaModel>(&model)) {
        return m->ka.points.empty() ? 0 : m->ka.points.front().dim();
    }
    if (const auto* m = std::get_if<LinearDetModel>(&model)) return m->A.dim();
    return std::get<LinearGaussModel>(model).A.dim();
}

std::string model_name(const StationaryModel& model) {
    switch (model.index()) {
        case 0: return "det";
        case 1: return "gauss";
        default: return "gauss_ka";
    }
}

models::State fixed_point(const models::State& A, double kappa) {
    check_kappa(kappa);
    return (1.0 / (1.0 - kappa)) * A;
}

cplx charfn_at(const StationaryModel& model, std::span<const double> U,
               const ProductTruncation& trunc, numkit::ProductResult<cplx>* report) {
    if (U.size() != model_dim(model)) {
        throw DomainError("charfn: frequency dimension does not match the model");
    }
    if (report) *report = numkit::ProductResult<cplx>{cplx{1.0}, 0, true};
    // Normalization Psi(0) = 1 holds exactly, independent of rounding in sum p_k.
    if (std::all_of(U.begin(), U.end(), [](double u) { return u == 0.0; })) return {1.0, 0.0};
    if (const auto* det = std::get_if<LinearDetModel>(&model)) {
        const double phase = dot(det->A.span(), U) / (1.0 - det->kappa);
        return {std::cos(phase), -std::sin(phase)};
    }
    if (const auto* g = std::get_if<LinearGaussModel>(&model)) {
        const double phase = dot(g->A.span(), U) / (1.0 - g->kappa);
        const double decay = std::exp(-0.25 * g->R * dot(U, U) / (1.0 - g->kappa * g->kappa));
        return decay * cplx(std::cos(phase), -std::sin(phase));
    }
    const auto& m = std::get<GaussKaModel>(model);
    double scale = 0.0;
    for (const auto& p : m.ka.points) scale = std::max(scale, std::fabs(dot(p.span(), U)));
    const auto product = numkit::truncated_product(
        [&](std::size_t gamma) {
            return ka_factor(m.ka, U, std::pow(m.kappa, static_cast<double>(gamma)));
        },
        trunc, numkit::shrink_index(scale, m.kappa));
    if (report) *report = product;
    const double decay = std::exp(-0.25 * m.R * dot(U, U) / (1.0 - m.kappa * m.kappa));
    return decay * product.value;
}

cplx dilatation_factor(const StationaryModel& model, std::span<const double> U) {
    if (const auto* det = std::get_if<LinearDetModel>(&model)) {
        const double phase = dot(det->A.span(), U);
        return {std::cos(phase), -std::sin(phase)};
    }
    if (const auto* g = std::get_if<LinearGaussModel>(&model)) {
        const double phase = dot(g->A.span(), U);
        return std::exp(-0.25 * g->R * dot(U, U)) * cplx(std::cos(phase), -std::sin(phase));
    }
    const auto& m = std::get<GaussKaModel>(model);
    return std::exp(-0.25 * m.R * dot(U, U)) * ka_factor(m.ka, U, 1.0);
}

CharFnResult charfn(const StationaryModel& model, const Grid& grid,
                    const ProductTruncation& trunc) {
    validate(model);
    trunc.validate();
    const std::size_t d = model_dim(model);
    if (grid.dim() != d) throw DomainError("charfn: grid dimension does not match the model");

    CharFnResult out;
    out.grid = grid;
    out.values.resize(grid.size());
    out.terms_used.assign(grid.size(), 0);
    std::vector<char> flags(grid.size(), 0);

    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (grid.size() + kChunk - 1) / kChunk;
    numkit::parallel_for(chunks, [&](std::size_t c) {
        std::array<double, Grid::kMaxDim> U{};
        const std::size_t end = std::min(grid.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            grid.point(i, std::span<double>(U.data(), d));
            numkit::ProductResult<cplx> report;
            out.values[i] = charfn_at(model, std::span<const double>(U.data(), d), trunc, &report);
            out.terms_used[i] = report.terms_used;
            flags[i] = report.converged ? 0 : 1;
        }
    });
    out.truncated.assign(flags.begin(), flags.end());
    out.flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));

    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (!std::is_same_v<M, GaussKaModel>) {
                const auto fp = fixed_point(m.A, m.kappa);
                out.mean.assign(fp.span().begin(), fp.span().end());
                double var = 0.0;
                if constexpr (std::is_same_v<M, LinearGaussModel>) {
                    var = m.R / (2.0 * (1.0 - m.kappa * m.kappa));
                }
                out.variance.assign(d, var);
            }
        },
        model);
    return out;
}

CharFnResult charfn_linear_det(const models::State& A, double kappa, const Grid& grid) {
    return charfn(LinearDetModel{A, kappa}, grid);
}

CharFnResult charfn_linear_gauss(const models::State& A, double kappa, double R,
                                 const Grid& grid) {
    return charfn(LinearGaussModel{A, kappa, R}, grid);
}

CharFnResult charfn_gauss_ka(double kappa, double R, const models::KuboAndersen& ka,
                             const Grid& grid, const ProductTruncation& trunc) {
    return charfn(GaussKaModel{kappa, R, ka}, grid, trunc);
}

ComplexGridFunction CharFnResult::as_grid_function() const {
    ComplexGridFunction f(grid);
    f.values = values;
    return f;
}

double functional_residual_max(const StationaryModel& model, const Grid& grid,
                               const ProductTruncation& trunc) {
    validate(model);
    const std::size_t d = model_dim(model);
    if (grid.dim() != d) throw DomainError("functional_residual: grid dimension mismatch");
    const double kappa = std::visit([](const auto& m) { return m.kappa; }, model);
    std::vector<double> residual(grid.size());
    numkit::parallel_for(grid.size(), [&](std::size_t i) {
        std::array<double, Grid::kMaxDim> U{};
        std::array<double, Grid::kMaxDim> KU{};
        grid.point(i, std::span<double>(U.data(), d));
        for (std::size_t j = 0; j < d; ++j) KU[j] = kappa * U[j];
        const std::span<const double> u(U.data(), d);
        const cplx lhs = charfn_at(model, u, trunc);
        const cplx rhs =
            dilatation_factor(model, u) * charfn_at(model, std::span<const double>(KU.data(), d), trunc);
        residual[i] = std::abs(lhs - rhs);
    });
    return *std::max_element(residual.begin(), residual.end());
}

DensityResult density_from_charfn(const CharFnResult& cf, const Grid& xgrid) {
    const Grid& ugrid = cf.grid;
    const std::size_t d = ugrid.dim();
    if (xgrid.dim() != d) throw DomainError("density_from_charfn: x grid dimension mismatch");
    for (const auto& a : ugrid.axes()) {
        if (!a.symmetric()) {
            throw DomainError("density_from_charfn: frequency grid must be symmetric about 0");
        }
    }
    if (cf.values.size() != ugrid.size()) {
        throw DomainError("density_from_charfn: sample count does not match the grid");
    }

    DensityResult out;
    // Boundary decay check on every face of the frequency box.
    for (std::size_t i = 0; i < ugrid.size(); ++i) {
        const auto idx = ugrid.unravel(i);
        bool boundary = false;
        for (std::size_t a = 0; a < d; ++a) {
            boundary = boundary || idx[a] == 0 || idx[a] + 1 == ugrid.axis(a).count;
        }
        if (boundary) out.boundary_max = std::max(out.boundary_max, std::abs(cf.values[i]));
    }
    if (!(out.boundary_max < kBoundaryDecay)) {
        out.boundary_decay_ok = false;
        std::ostringstream msg;
        msg << "characteristic function does not decay at the frequency-grid boundary (max |Psi| = "
            << out.boundary_max << " >= " << kBoundaryDecay
            << "); the inverse transform is unreliable";
        out.warning = msg.str();
    }

    std::vector<std::vector<double>> weights;
    for (const auto& a : ugrid.axes()) weights.push_back(trapezoid_weights(a));
    std::vector<double> w(ugrid.size());
    std::vector<double> upoints(ugrid.size() * d);
    for (std::size_t i = 0; i < ugrid.size(); ++i) {
        const auto idx = ugrid.unravel(i);
        double wi = 1.0;
        for (std::size_t a = 0; a < d; ++a) wi *= weights[a][idx[a]];
        w[i] = wi;
        ugrid.point(i, std::span<double>(upoints.data() + i * d, d));
    }
    const double norm = std::pow(2.0 * std::numbers::pi, -static_cast<double>(d));

    out.density = RealGridFunction(xgrid);
    numkit::parallel_for(xgrid.size(), [&](std::size_t j) {
        std::array<double, Grid::kMaxDim> x{};
        xgrid.point(j, std::span<double>(x.data(), d));
        double acc = 0.0;
        for (std::size_t i = 0; i < ugrid.size(); ++i) {
            double phase = 0.0;
            for (std::size_t a = 0; a < d; ++a) phase += x[a] * upoints[i * d + a];
            // Re(Psi e^{i phase})
            acc += w[i] * (cf.values[i].real() * std::cos(phase) - cf.values[i].imag() * std::sin(phase));
        }
        out.density.values[j] = norm * acc;
    });

    std::vector<std::vector<double>> xweights;
    for (const auto& a : xgrid.axes()) xweights.push_back(trapezoid_weights(a));
    double mass = 0.0;
    for (std::size_t j = 0; j < xgrid.size(); ++j) {
        const auto idx = xgrid.unravel(j);
        double wj = 1.0;
        for (std::size_t a = 0; a < d; ++a) wj *= xweights[a][idx[a]];
        mass += wj * out.density.values[j];
    }
    out.mass = mass;
    return out;
}

}  // namespace dilatox::stationary
