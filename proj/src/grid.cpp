#include "phom/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "phom/errors.hpp"

namespace phom {

TorusGrid::TorusGrid(int n) : n_(n) {
    if (n <= 0) throw ConfigError("grid size must be positive, got " + std::to_string(n));
}

GridFunction::GridFunction(TorusGrid grid, double value) : grid_(grid), values_(grid.size(), value) {}

GridFunction::GridFunction(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("GridFunction: value count does not match grid");
}

GridFunction GridFunction::sample(TorusGrid grid, const std::function<double(double, double)> &f) {
    GridFunction g(grid);
    for (int j = 0; j < grid.n(); ++j)
        for (int i = 0; i < grid.n(); ++i) g.at(i, j) = f(grid.x(i), grid.y(j));
    return g;
}

double GridFunction::mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

GridFunction &GridFunction::subtract_mean() {
    const double m = mean();
    for (double &v : values_) v -= m;
    return *this;
}

GridFunction GridFunction::shifted(int di, int dj) const {
    GridFunction g(grid_);
    const int n = grid_.n();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g.at(i, j) = at(i - di, j - dj);
    return g;
}

NeighbourTable::NeighbourTable(int n) : plus(n), minus(n) {
    for (int i = 0; i < n; ++i) {
        plus[i] = (i + 1) % n;
        minus[i] = (i + n - 1) % n;
    }
}

Sym2 hessian_standard_at(const GridFunction &u, int i, int j) {
    const double inv_h2 = 1.0 / (u.grid().h() * u.grid().h());
    const double c = u.at(i, j);
    const double uxx = (u.at(i + 1, j) - 2.0 * c + u.at(i - 1, j)) * inv_h2;
    const double uyy = (u.at(i, j + 1) - 2.0 * c + u.at(i, j - 1)) * inv_h2;
    const double uxy = (u.at(i + 1, j + 1) - u.at(i + 1, j - 1) - u.at(i - 1, j + 1) +
                        u.at(i - 1, j - 1)) *
                       (0.25 * inv_h2);
    return {uxx, uxy, uyy};
}

std::vector<Sym2> hessian_standard(const GridFunction &u) {
    const TorusGrid &g = u.grid();
    const int n = g.n();
    if (n < 3) throw ConfigError("hessian_standard needs n >= 3");
    std::vector<Sym2> out(g.size());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out[g.index(i, j)] = hessian_standard_at(u, i, j);
    return out;
}

double directional_second_difference(const GridFunction &u, Offset p, int i, int j) {
    if (p.di == 0 && p.dj == 0) throw std::invalid_argument("direction offset must be nonzero");
    const double h = u.grid().h();
    return (u.at(i + p.di, j + p.dj) - 2.0 * u.at(i, j) + u.at(i - p.di, j - p.dj)) /
           (h * h * p.norm_sq());
}

std::vector<Offset> default_directions() { return {{1, 0}, {0, 1}, {1, 1}, {1, -1}}; }

std::vector<Offset> widened_directions() {
    return {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1}, {1, -2}};
}

bool parallel(Offset a, Offset b) { return a.di * b.dj - a.dj * b.di == 0; }

std::optional<std::vector<double>> decompose_directional(const Sym2 &g,
                                                         std::span<const Offset> dirs) {
    const std::size_t m = dirs.size();
    std::vector<double> w(m, 0.0);

    // Diagonal g on the axes, without rounding.
    if (g.a12 == 0.0 && g.a11 >= 0.0 && g.a22 >= 0.0) {
        int ix = -1, iy = -1;
        for (std::size_t k = 0; k < m; ++k) {
            if (dirs[k].dj == 0) ix = static_cast<int>(k);
            if (dirs[k].di == 0) iy = static_cast<int>(k);
        }
        if (ix >= 0 && iy >= 0) {
            w[ix] = g.a11;
            w[iy] = g.a22;
            return w;
        }
    }

    // Columns are (p1^2, p1 p2, p2^2) / |p|^2; solve by Cramer's rule.
    const auto column = [&](std::size_t k) {
        const double s = 1.0 / dirs[k].norm_sq();
        return std::array<double, 3>{dirs[k].di * dirs[k].di * s, dirs[k].di * dirs[k].dj * s,
                                     dirs[k].dj * dirs[k].dj * s};
    };
    const auto det3 = [](const std::array<double, 3> &a, const std::array<double, 3> &b,
                         const std::array<double, 3> &c) {
        return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) +
               c[0] * (a[1] * b[2] - a[2] * b[1]);
    };
    const std::array<double, 3> rhs{g.a11, g.a12, g.a22};
    const double scale = std::abs(g.a11) + std::abs(g.a12) + std::abs(g.a22);
    const double neg_tol = 1e-13 * scale;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            for (std::size_t c = b + 1; c < m; ++c) {
                const auto ca = column(a), cb = column(b), cc = column(c);
                const double d = det3(ca, cb, cc);
                if (std::abs(d) < 1e-12) continue;
                const double wa = det3(rhs, cb, cc) / d;
                const double wb = det3(ca, rhs, cc) / d;
                const double wc = det3(ca, cb, rhs) / d;
                if (wa < -neg_tol || wb < -neg_tol || wc < -neg_tol) continue;
                std::fill(w.begin(), w.end(), 0.0);
                w[a] = std::max(wa, 0.0);
                w[b] = std::max(wb, 0.0);
                w[c] = std::max(wc, 0.0);
                return w;
            }
        }
    }
    return std::nullopt;
}

}  // namespace phom
