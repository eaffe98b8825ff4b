#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dilatox::numkit {

/// Uniform sampling of [lo, hi] with `count` points, endpoints included.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;

    Axis() = default;
    Axis(double lo_, double hi_, std::size_t count_);

    void validate() const;
    double step() const noexcept { return (hi - lo) / static_cast<double>(count - 1); }

    /// Point i. Mirrored indices of a symmetric axis give exactly negated values,
    /// and the midpoint of an odd symmetric axis is exactly zero.
    double operator[](std::size_t i) const noexcept;

    /// lo == -hi to within a few ulps.
    bool symmetric() const noexcept;
};

/// Rectangular product grid in 1..3 dimensions; flat index is row-major (last axis fastest).
class Grid {
public:
    static constexpr std::size_t kMaxDim = 3;

    Grid() = default;
    explicit Grid(std::vector<Axis> axes);

    static Grid line(double lo, double hi, std::size_t count);
    static Grid plane(const Axis& x, const Axis& y);

    std::size_t dim() const noexcept { return axes_.size(); }
    std::size_t size() const noexcept { return size_; }
    const Axis& axis(std::size_t i) const { return axes_.at(i); }
    const std::vector<Axis>& axes() const noexcept { return axes_; }

    /// Writes the coordinates of flat index `flat` into out[0..dim).
    void point(std::size_t flat, std::span<double> out) const;
    std::array<double, kMaxDim> point(std::size_t flat) const;
    std::array<std::size_t, kMaxDim> unravel(std::size_t flat) const;

    /// Volume element: product of axis steps.
    double cell_volume() const noexcept;

    bool same_as(const Grid& other, double rel_tol = 1e-12) const noexcept;

private:
    std::vector<Axis> axes_;
    std::size_t size_ = 0;
};

/// Samples of a function on a Grid.
template <class T>
struct GridFunction {
    Grid grid;
    std::vector<T> values;

    GridFunction() = default;
    explicit GridFunction(Grid g) : grid(std::move(g)), values(grid.size()) {}
};

using ComplexGridFunction = GridFunction<std::complex<double>>;
using RealGridFunction = GridFunction<double>;

}  // namespace dilatox::numkit
