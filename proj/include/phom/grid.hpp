#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "phom/sym2.hpp"

namespace phom {

/// Uniform n x n grid on the unit torus [0,1)^2. Point (i, j) sits at
/// (x, y) = (i h, j h); storage is row-major with j the row index.
class TorusGrid {
public:
    TorusGrid() = default;
    explicit TorusGrid(int n);

    int n() const { return n_; }
    double h() const { return 1.0 / n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

    int wrap(int i) const {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(wrap(j)) * n_ + wrap(i);
    }
    double x(int i) const { return i * h(); }
    double y(int j) const { return j * h(); }

    friend bool operator==(const TorusGrid &, const TorusGrid &) = default;

private:
    int n_ = 0;
};

/// Periodic scalar field on a TorusGrid.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(TorusGrid grid, double value = 0.0);
    GridFunction(TorusGrid grid, std::vector<double> values);

    /// Samples f(x, y) at the grid points.
    static GridFunction sample(TorusGrid grid, const std::function<double(double, double)> &f);

    const TorusGrid &grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double &operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double &at(int i, int j) { return values_[grid_.index(i, j)]; }
    double at(int i, int j) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// h^2 * sum, i.e. the integral over the torus.
    double mean() const;
    double max_abs() const;
    double min() const;
    double max() const;
    GridFunction &subtract_mean();

    /// g(i, j) = f(i - di, j - dj): the field translated by (di, dj) points.
    GridFunction shifted(int di, int dj) const;

    friend bool operator==(const GridFunction &, const GridFunction &) = default;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/// Precomputed periodic neighbour indices, one table per axis.
struct NeighbourTable {
    explicit NeighbourTable(int n);
    std::vector<int> plus;   // (i + 1) mod n
    std::vector<int> minus;  // (i - 1) mod n
};

/// Standard 9-point Hessian: centred second differences on the axes and the
/// four-corner cross stencil for u_xy.
std::vector<Sym2> hessian_standard(const GridFunction &u);

/// Hessian at a single point with the same stencil as hessian_standard.
Sym2 hessian_standard_at(const GridFunction &u, int i, int j);

/// Integer stencil offset.
struct Offset {
    int di = 0;
    int dj = 0;
    int norm_sq() const { return di * di + dj * dj; }
    friend bool operator==(const Offset &, const Offset &) = default;
};

/// (u(x + p h) - 2 u(x) + u(x - p h)) / (h^2 |p|^2), the second derivative
/// along p / |p|.
double directional_second_difference(const GridFunction &u, Offset p, int i, int j);

/// The default wide-stencil direction set {(1,0), (0,1), (1,1), (1,-1)}.
std::vector<Offset> default_directions();

/// Adds (2,1), (1,2), (2,-1), (1,-2) to the default set.
std::vector<Offset> widened_directions();

bool parallel(Offset a, Offset b);

/// Nonnegative weights w with sum_p w_p p p^T / |p|^2 = g over at most three
/// of the given directions (first feasible triple in list order). Empty when g
/// is not representable on this stencil.
std::optional<std::vector<double>> decompose_directional(const Sym2 &g,
                                                         std::span<const Offset> dirs);

}  // namespace phom
