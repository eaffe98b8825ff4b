#include "dilatox/ikeda.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "dilatox/error.hpp"
#include "dilatox/numkit/bessel.hpp"
#include "dilatox/numkit/parallel.hpp"
#include "dilatox/numkit/quadrature.hpp"

namespace dilatox::ikeda {
namespace {

void check_kappa(double kappa, const char* who) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        std::ostringstream msg;
        msg << who << ": kappa must satisfy 0 < kappa < 1, got " << kappa;
        throw DomainError(msg.str());
    }
}

void check_rgrid(std::span<const double> rgrid, const char* who) {
    if (rgrid.empty()) throw DomainError(std::string(who) + ": r grid is empty");
    for (double r : rgrid) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw DomainError(std::string(who) + ": r values must be finite and >= 0");
        }
    }
}

struct Node {
    double beta;
    double wk;      // Kronrod weight (scaled to the panel)
    double wg;      // Gauss weight, zero off the Gauss nodes
    double weight;  // W(beta): Xi, possibly times a Gaussian factor
};

using WeightFn = std::function<double(double)>;

// The 15 nodes of one G7K15 panel on [a, b].
void panel_nodes(double a, double b, const WeightFn& W, std::vector<Node>& out) {
    using R = numkit::GaussKronrod15;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    out.push_back({center, R::kronrod_weights[7] * half, R::gauss_weights[3] * half, W(center)});
    for (int j = 0; j < 7; ++j) {
        const double dx = half * R::nodes[j];
        const double wg = (j % 2 == 1) ? R::gauss_weights[j / 2] * half : 0.0;
        out.push_back({center - dx, R::kronrod_weights[j] * half, wg, W(center - dx)});
        out.push_back({center + dx, R::kronrod_weights[j] * half, wg, W(center + dx)});
    }
}

// Splits a panel until the density integrand at the most oscillatory radius
// passes the per-unit-width error budget.
void refine_panel(double a, double b, const WeightFn& W, double k_ref, double budget,
                  std::size_t depth, std::vector<Node>& out) {
    std::vector<Node> nodes;
    nodes.reserve(15);
    panel_nodes(a, b, W, nodes);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (const auto& n : nodes) {
        const double f = n.beta * n.weight * numkit::bessel_j0(n.beta * k_ref);
        kronrod += n.wk * f;
        gauss += n.wg * f;
    }
    if (depth == 0 || std::fabs(kronrod - gauss) <= budget * (b - a)) {
        out.insert(out.end(), nodes.begin(), nodes.end());
        return;
    }
    const double mid = 0.5 * (a + b);
    refine_panel(a, mid, W, k_ref, budget, depth - 1, out);
    refine_panel(mid, b, W, k_ref, budget, depth - 1, out);
}

RadialDensity hankel_radial(double kappa, std::span<const double> rgrid, const WeightFn& W,
                            const HankelOptions& options, const char* who) {
    check_kappa(kappa, who);
    check_rgrid(rgrid, who);
    if (!(options.quad_tol > 0.0)) throw DomainError(std::string(who) + ": quad_tol must be positive");
    if (!(options.beta_start > 0.0)) throw DomainError(std::string(who) + ": beta_start must be positive");

    const std::size_t nr = rgrid.size();
    const double r_max = *std::max_element(rgrid.begin(), rgrid.end());
    // Half a period of the slower of J0(beta) inside Xi and the kernel J0(beta r / kappa).
    const double width = std::numbers::pi * std::min(1.0, kappa / std::max(r_max, kappa));
    const double k_ref = r_max / kappa;
    const double pref = 1.0 / (2.0 * std::numbers::pi * kappa * kappa);
    const double budget = 1e-4 * options.quad_tol / pref;

    std::vector<double> dens(nr, 0.0);
    std::vector<double> cdf(nr, 0.0);
    std::vector<double> dens_inc(nr);
    std::vector<double> cdf_inc(nr);
    std::size_t total_nodes = 0;

    double lo = 0.0;
    double hi = options.beta_start;
    for (;;) {
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / width));
        const double step = (hi - lo) / static_cast<double>(panels);
        std::vector<std::vector<Node>> per_panel(panels);
        numkit::parallel_for(panels, [&](std::size_t p) {
            const double a = lo + step * static_cast<double>(p);
            const double b = (p + 1 == panels) ? hi : lo + step * static_cast<double>(p + 1);
            refine_panel(a, b, W, k_ref, budget, options.max_panel_depth, per_panel[p]);
        });
        std::vector<Node> nodes;
        for (auto& v : per_panel) nodes.insert(nodes.end(), v.begin(), v.end());
        total_nodes += nodes.size();

        numkit::parallel_for(nr, [&](std::size_t i) {
            const double q = rgrid[i] / kappa;
            double d = 0.0;
            double c = 0.0;
            for (const auto& n : nodes) {
                const auto b = numkit::bessel_j01(n.beta * q);
                d += n.wk * n.beta * n.weight * b.j0;
                c += n.wk * n.weight * q * b.j1;
            }
            dens_inc[i] = pref * d;
            cdf_inc[i] = c;
        });
        double worst = 0.0;
        for (std::size_t i = 0; i < nr; ++i) {
            dens[i] += dens_inc[i];
            cdf[i] += cdf_inc[i];
            worst = std::max({worst, std::fabs(dens_inc[i]), std::fabs(cdf_inc[i])});
        }
        if (lo > 0.0 && worst < options.quad_tol) break;
        if (hi * 2.0 > options.beta_cap) {
            std::ostringstream msg;
            msg << who << ": upper Hankel limit did not converge below beta = " << options.beta_cap
                << " (last increment " << worst << ")";
            throw NumericalError(msg.str());
        }
        lo = hi;
        hi *= 2.0;
    }

    RadialDensity out;
    out.kappa = kappa;
    out.r.assign(rgrid.begin(), rgrid.end());
    out.density = std::move(dens);
    out.cdf = std::move(cdf);
    out.beta_max = hi;
    out.nodes = total_nodes;
    out.min_unclipped = *std::min_element(out.density.begin(), out.density.end());
    for (std::size_t i = 1; i < nr; ++i) {
        const double f0 = 2.0 * std::numbers::pi * out.r[i - 1] * out.density[i - 1];
        const double f1 = 2.0 * std::numbers::pi * out.r[i] * out.density[i];
        out.mass += 0.5 * (f0 + f1) * (out.r[i] - out.r[i - 1]);
    }
    return out;
}

double gaussian_std(double kappa, double R) { return std::sqrt(0.5 * R / (1.0 - kappa * kappa)); }

void check_pst_inputs(double kappa, double R, const numkit::Grid& g, const char* who) {
    check_kappa(kappa, who);
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError(std::string(who) + ": R must be positive");
    if (g.dim() != 2) throw DomainError(std::string(who) + ": grid must be two-dimensional");
    const double sd = gaussian_std(kappa, R);
    for (std::size_t a = 0; a < 2; ++a) {
        if (g.axis(a).step() > sd / 3.0) {
            std::ostringstream msg;
            msg << who << ": grid step " << g.axis(a).step() << " exceeds one third of the Gaussian std "
                << sd << "; refine the grid";
            throw DomainError(msg.str());
        }
    }
}

double max_radius(const numkit::Grid& g) {
    double best = 0.0;
    for (double x : {g.axis(0).lo, g.axis(0).hi}) {
        for (double y : {g.axis(1).lo, g.axis(1).hi}) best = std::max(best, std::hypot(x - 1.0, y));
    }
    return best;
}

std::vector<double> uniform_radii(double r_max, std::size_t count) {
    if (count < 2) throw DomainError("p_st_ikeda: radial_points must be >= 2");
    std::vector<double> r(count);
    for (std::size_t i = 0; i < count; ++i) {
        r[i] = r_max * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return r;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

std::vector<double> cell_gaussian_kernel(double h, double sd) {
    const auto half = static_cast<std::size_t>(std::ceil(8.0 * sd / h));
    std::vector<double> k(2 * half + 1);
    auto Phi = [sd](double x) { return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2)); };
    for (std::size_t j = 0; j < k.size(); ++j) {
        const double offset = (static_cast<double>(j) - static_cast<double>(half)) * h;
        k[j] = Phi(offset + 0.5 * h) - Phi(offset - 0.5 * h);
    }
    return k;
}

}  // namespace

double xi(double kappa, double beta, const ProductTruncation& trunc,
          numkit::ProductResult<double>* report) {
    check_kappa(kappa, "xi");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("xi: beta must be finite and >= 0");
    if (beta == 0.0) {
        if (report) *report = {1.0, 0, true};
        return 1.0;
    }
    // |J0(x) - 1| decreases monotonically once x is below the first zero 2.405.
    const std::size_t first = numkit::shrink_index(beta, kappa, 2.0);
    double scaled = beta;
    std::size_t at = 0;
    const auto r = numkit::truncated_product(
        [&](std::size_t k) {
            while (at < k) {
                scaled *= kappa;
                ++at;
            }
            return numkit::bessel_j0(scaled);
        },
        trunc, first);
    if (report) *report = r;
    return r.value;
}

XiFunction::XiFunction(double kappa, ProductTruncation trunc) : kappa_(kappa), trunc_(trunc) {
    check_kappa(kappa, "XiFunction");
    trunc_.validate();
}

void XiFunction::sample(std::span<const double> betas) {
    std::vector<double> values(betas.size());
    std::vector<char> flags(betas.size(), 0);
    numkit::parallel_for(betas.size(), [&](std::size_t i) {
        numkit::ProductResult<double> r;
        values[i] = xi(kappa_, betas[i], trunc_, &r);
        flags[i] = r.converged ? 0 : 1;
    });
    betas_.assign(betas.begin(), betas.end());
    values_ = std::move(values);
    flagged_ = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
}

double XiFunction::recursion_residual_max() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < betas_.size(); ++i) {
        const double rhs = numkit::bessel_j0(betas_[i]) * xi(kappa_, kappa_ * betas_[i], trunc_);
        worst = std::max(worst, std::fabs(values_[i] - rhs));
    }
    return worst;
}

std::vector<double> RadialDensity::clipped() const {
    std::vector<double> out(density);
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

double RadialDensity::cdf_at(double radius) const {
    if (r.empty()) throw ContractError("RadialDensity::cdf_at: empty density");
    return std::clamp(interpolate(r, cdf, radius), 0.0, 1.0);
}

double RadialDensity::density_at(double radius) const {
    if (r.empty()) throw ContractError("RadialDensity::density_at: empty density");
    if (radius > r.back()) return 0.0;
    return interpolate(r, density, radius);
}

RadialDensity p_ch(double kappa, std::span<const double> rgrid, const ProductTruncation& trunc,
                   const HankelOptions& options) {
    check_kappa(kappa, "p_ch");
    trunc.validate();
    const WeightFn W = [kappa, trunc](double beta) { return xi(kappa, beta, trunc); };
    return hankel_radial(kappa, rgrid, W, options, "p_ch");
}

RadialDensity p_st_radial(double kappa, double R, std::span<const double> rgrid,
                          const ProductTruncation& trunc, const HankelOptions& options) {
    check_kappa(kappa, "p_st_radial");
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("p_st_radial: R must be positive");
    trunc.validate();
    const double damping = R / (1.0 - kappa * kappa) / (4.0 * kappa * kappa);
    const WeightFn W = [kappa, trunc, damping](double beta) {
        const double g = std::exp(-damping * beta * beta);
        return g == 0.0 ? 0.0 : g * xi(kappa, beta, trunc);
    };
    return hankel_radial(kappa, rgrid, W, options, "p_st_radial");
}

PStResult p_st_ikeda(double kappa, double R, const numkit::Grid& xygrid, const PStOptions& options) {
    check_pst_inputs(kappa, R, xygrid, "p_st_ikeda");
    const auto radii = uniform_radii(max_radius(xygrid), options.radial_points);
    const RadialDensity table = p_st_radial(kappa, R, radii, options.trunc, options.hankel);

    PStResult out;
    out.density = numkit::RealGridFunction(xygrid);
    out.gaussian_std = gaussian_std(kappa, R);
    out.min_unclipped = table.min_unclipped;
    for (std::size_t i = 0; i < xygrid.size(); ++i) {
        const auto p = xygrid.point(i);
        out.density.values[i] = interpolate(table.r, table.density, std::hypot(p[0] - 1.0, p[1]));
    }
    double mass = 0.0;
    for (double v : out.density.values) mass += v;
    out.mass = mass * xygrid.cell_volume();
    return out;
}

PStResult p_st_ikeda_direct(double kappa, double R, const numkit::Grid& xygrid,
                            const PStOptions& options, std::size_t subsamples) {
    check_pst_inputs(kappa, R, xygrid, "p_st_ikeda_direct");
    if (subsamples < 1) throw DomainError("p_st_ikeda_direct: subsamples must be >= 1");
    const double reach = attractor_radius(kappa) * 1.02;
    const auto radii = uniform_radii(reach, options.radial_points);
    const std::vector<double> pch = p_ch(kappa, radii, options.trunc, options.hankel).clipped();

    const numkit::Axis& ax = xygrid.axis(0);
    const numkit::Axis& ay = xygrid.axis(1);
    const double hx = ax.step();
    const double hy = ay.step();
    const std::size_t nx = ax.count;
    const std::size_t ny = ay.count;

    // P_ch mass per cell, cells centered on grid nodes.
    std::vector<double> masses(xygrid.size(), 0.0);
    const double sub_area = hx * hy / static_cast<double>(subsamples * subsamples);
    numkit::parallel_for(nx, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) {
            double m = 0.0;
            for (std::size_t a = 0; a < subsamples; ++a) {
                const double x = ax[i] + hx * ((static_cast<double>(a) + 0.5) / subsamples - 0.5);
                for (std::size_t b = 0; b < subsamples; ++b) {
                    const double y = ay[j] + hy * ((static_cast<double>(b) + 0.5) / subsamples - 0.5);
                    const double r = std::hypot(x - 1.0, y);
                    if (r <= reach) m += interpolate(radii, pch, r);
                }
            }
            masses[i * ny + j] = m * sub_area;
        }
    });

    const double sd = gaussian_std(kappa, R);
    const auto kx = cell_gaussian_kernel(hx, sd);
    const auto ky = cell_gaussian_kernel(hy, sd);
    const auto half_x = static_cast<std::ptrdiff_t>(kx.size() / 2);
    const auto half_y = static_cast<std::ptrdiff_t>(ky.size() / 2);

    std::vector<double> tmp(xygrid.size(), 0.0);
    numkit::parallel_for(nx, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) {
            double s = 0.0;
            for (std::ptrdiff_t d = -half_y; d <= half_y; ++d) {
                const auto jj = static_cast<std::ptrdiff_t>(j) - d;
                if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(ny)) continue;
                s += ky[static_cast<std::size_t>(d + half_y)] * masses[i * ny + static_cast<std::size_t>(jj)];
            }
            tmp[i * ny + j] = s;
        }
    });
    PStResult out;
    out.density = numkit::RealGridFunction(xygrid);
    out.gaussian_std = sd;
    numkit::parallel_for(nx, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) {
            double s = 0.0;
            for (std::ptrdiff_t d = -half_x; d <= half_x; ++d) {
                const auto ii = static_cast<std::ptrdiff_t>(i) - d;
                if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(nx)) continue;
                s += kx[static_cast<std::size_t>(d + half_x)] * tmp[static_cast<std::size_t>(ii) * ny + j];
            }
            out.density.values[i * ny + j] = s / (hx * hy);
        }
    });
    double mass = 0.0;
    for (double v : out.density.values) mass += v;
    out.mass = mass * hx * hy;
    out.min_unclipped = *std::min_element(out.density.values.begin(), out.density.values.end());
    return out;
}

EnvelopeSplit j0_envelope_split(double x, double x_min) {
    if (!(x >= x_min) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "j0_envelope_split: x must be >= " << x_min << ", got " << x;
        throw DomainError(msg.str());
    }
    const double chi = numkit::bessel_modulus0(x) / std::numbers::sqrt2;
    const double phase = std::cos(x) + std::sin(x);  // sqrt2 cos(x - pi/4)
    return {chi, phase};
}

double attractor_radius(double kappa) {
    check_kappa(kappa, "attractor_radius");
    return kappa / (1.0 - kappa);
}

}  // namespace dilatox::ikeda
