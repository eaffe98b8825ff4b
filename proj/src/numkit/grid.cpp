#include "dilatox/numkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dilatox/error.hpp"

namespace dilatox::numkit {

Axis::Axis(double lo_, double hi_, std::size_t count_) : lo(lo_), hi(hi_), count(count_) {
    validate();
}

void Axis::validate() const {
    if (count < 2) throw DomainError("grid axis: count must be >= 2");
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw DomainError("grid axis: requires finite lo < hi");
    }
}

double Axis::operator[](std::size_t i) const noexcept {
    const double n = static_cast<double>(count - 1);
    const double w_hi = static_cast<double>(i) / n;
    const double w_lo = static_cast<double>(count - 1 - i) / n;
    return lo * w_lo + hi * w_hi;
}

bool Axis::symmetric() const noexcept {
    return std::fabs(lo + hi) <= 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(hi);
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > kMaxDim) {
        throw DomainError("grid: dimension must be between 1 and 3");
    }
    size_ = 1;
    for (const auto& a : axes_) {
        a.validate();
        size_ *= a.count;
    }
}

Grid Grid::line(double lo, double hi, std::size_t count) { return Grid({Axis(lo, hi, count)}); }

Grid Grid::plane(const Axis& x, const Axis& y) { return Grid({x, y}); }

std::array<std::size_t, Grid::kMaxDim> Grid::unravel(std::size_t flat) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t d = axes_.size(); d-- > 0;) {
        idx[d] = flat % axes_[d].count;
        flat /= axes_[d].count;
    }
    return idx;
}

void Grid::point(std::size_t flat, std::span<double> out) const {
    const auto idx = unravel(flat);
    for (std::size_t d = 0; d < axes_.size(); ++d) out[d] = axes_[d][idx[d]];
}

std::array<double, Grid::kMaxDim> Grid::point(std::size_t flat) const {
    std::array<double, kMaxDim> p{};
    point(flat, std::span<double>(p.data(), axes_.size()));
    return p;
}

double Grid::cell_volume() const noexcept {
    double v = 1.0;
    for (const auto& a : axes_) v *= a.step();
    return v;
}

bool Grid::same_as(const Grid& other, double rel_tol) const noexcept {
    if (axes_.size() != other.axes_.size()) return false;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        const Axis& a = axes_[d];
        const Axis& b = other.axes_[d];
        const double scale = std::max({1.0, std::fabs(a.lo), std::fabs(a.hi)});
        if (a.count != b.count || std::fabs(a.lo - b.lo) > rel_tol * scale ||
            std::fabs(a.hi - b.hi) > rel_tol * scale) {
            return false;
        }
    }
    return true;
}

}  // namespace dilatox::numkit
