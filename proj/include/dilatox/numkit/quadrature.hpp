#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "dilatox/error.hpp"

namespace dilatox::numkit {

/// 15-point Gauss-Kronrod rule with its embedded 7-point Gauss rule on [-1, 1].
/// Nodes are listed from the outermost positive abscissa down to 0; odd indices are Gauss nodes.
struct GaussKronrod15 {
    static constexpr std::array<double, 8> nodes = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> kronrod_weights = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    // Gauss weights for nodes[1], nodes[3], nodes[5], nodes[7].
    static constexpr std::array<double, 4> gauss_weights = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <class T>
struct PanelEstimate {
    T kronrod{};
    T gauss{};
};

/// Applies G7K15 on [a, b].
template <class F>
auto gk15_panel(F& f, double a, double b) -> PanelEstimate<std::decay_t<decltype(f(0.0))>> {
    using T = std::decay_t<decltype(f(0.0))>;
    using R = GaussKronrod15;
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T kronrod = fc * R::kronrod_weights[7];
    T gauss = fc * R::gauss_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * R::nodes[j];
        const T sum = f(center - dx) + f(center + dx);
        kronrod += sum * R::kronrod_weights[j];
        if (j % 2 == 1) gauss += sum * R::gauss_weights[j / 2];
    }
    return {kronrod * half, gauss * half};
}

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;         ///< estimated absolute error
    std::size_t intervals = 0;  ///< panels in the final partition
    bool converged = false;
};

/// Globally adaptive G7K15 integration: the panel with the largest |K15 - G7|
/// is bisected until the summed estimate drops below tol (or below the rounding
/// floor of the result) or max_intervals panels exist. Works for real and complex
/// integrands; never throws on non-convergence, the flag reports it.
template <class F>
auto integrate(F&& f, double a, double b, double tol, std::size_t max_intervals = 4000)
    -> QuadResult<std::decay_t<decltype(f(0.0))>> {
    using T = std::decay_t<decltype(f(0.0))>;
    if (!(a < b)) throw DomainError("integrate: requires a < b");
    if (!(tol > 0.0)) throw DomainError("integrate: requires tol > 0");

    struct Panel {
        double a;
        double b;
        T value;
        double error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };
    auto evaluate = [&](double lo, double hi) {
        const auto est = gk15_panel(f, lo, hi);
        return Panel{lo, hi, est.kronrod, std::abs(est.kronrod - est.gauss)};
    };

    std::priority_queue<Panel> heap;
    Panel first = evaluate(a, b);
    T total = first.value;
    double total_error = first.error;
    heap.push(first);
    constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();

    while (total_error > tol && total_error > kRoundoff * std::abs(total) &&
           heap.size() < max_intervals) {
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval can no longer be split
        heap.pop();
        const Panel left = evaluate(worst.a, mid);
        const Panel right = evaluate(mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the partition so the running updates do not accumulate drift.
    QuadResult<T> out;
    out.intervals = heap.size();
    T sum{};
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = sum;
    out.error = err;
    out.converged = err <= tol || err <= kRoundoff * std::abs(sum);
    return out;
}

/// Real adaptive quadrature; throws QuadratureError (carrying the best estimate)
/// when the subdivision limit is exhausted before tol is met.
double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                     std::size_t max_intervals = 4000);

}  // namespace dilatox::numkit
