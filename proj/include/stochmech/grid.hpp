#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stochmech/common.hpp"

namespace stochmech {

// Uniform 1-D grid with n >= 3 nodes on [x_min, x_max].
class Grid {
public:
    Grid(double x_min, double x_max, int n)
        : x_min_(x_min), x_max_(x_max), n_(n) {
        if (!(x_max > x_min))
            throw std::invalid_argument("Grid: x_max must exceed x_min");
        if (n < 3)
            throw std::invalid_argument("Grid: need at least 3 nodes");
        h_ = (x_max - x_min) / (n - 1);
    }

    int n() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double h() const { return h_; }
    double x(int i) const { return x_min_ + h_ * i; }

    bool operator==(const Grid& o) const {
        return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    double x_min_, x_max_;
    int n_;
    double h_;
};

// Scalar field sampled on a grid at one instant.  Values are checked to be
// finite on construction.
class GridField {
public:
    GridField(Grid grid, std::vector<double> values, double time = 0.0)
        : grid_(grid), values_(std::move(values)), time_(time) {
        if (static_cast<int>(values_.size()) != grid_.n())
            throw std::invalid_argument("GridField: value count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("GridField: non-finite value");
    }

    const Grid& grid() const { return grid_; }
    double time() const { return time_; }
    int n() const { return grid_.n(); }

    double operator[](int i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
    double time_;
};

inline GridField make_field(const Grid& g, const std::function<double(double)>& f,
                            double time = 0.0) {
    std::vector<double> v(g.n());
    for (int i = 0; i < g.n(); ++i) v[i] = f(g.x(i));
    return GridField(g, std::move(v), time);
}

inline void require_same_grid(const GridField& a, const GridField& b) {
    if (a.grid() != b.grid())
        throw std::invalid_argument("fields live on different grids");
}

inline GridField map_field(const GridField& a, const std::function<double(double)>& f) {
    std::vector<double> v(a.n());
    for (int i = 0; i < a.n(); ++i) v[i] = f(a[i]);
    return GridField(a.grid(), std::move(v), a.time());
}

inline GridField zip_fields(const GridField& a, const GridField& b,
                            const std::function<double(double, double)>& f) {
    require_same_grid(a, b);
    std::vector<double> v(a.n());
    for (int i = 0; i < a.n(); ++i) v[i] = f(a[i], b[i]);
    return GridField(a.grid(), std::move(v), a.time());
}

inline GridField operator+(const GridField& a, const GridField& b) {
    return zip_fields(a, b, [](double x, double y) { return x + y; });
}
inline GridField operator-(const GridField& a, const GridField& b) {
    return zip_fields(a, b, [](double x, double y) { return x - y; });
}
inline GridField operator*(const GridField& a, const GridField& b) {
    return zip_fields(a, b, [](double x, double y) { return x * y; });
}
inline GridField operator*(double c, const GridField& a) {
    return map_field(a, [c](double x) { return c * x; });
}

// Second-order first derivative: central in the interior, one-sided
// three-point stencils at the ends.  Exact for polynomials of degree <= 2.
inline GridField gradient(const GridField& f) {
    const int n = f.n();
    const double h = f.grid().h();
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return GridField(f.grid(), std::move(d), f.time());
}

// Second-order second derivative; four-point one-sided stencils at the ends
// (three-point when the grid only has 3 nodes).
inline GridField laplacian(const GridField& f) {
    const int n = f.n();
    const double h2 = f.grid().h() * f.grid().h();
    std::vector<double> d(n);
    for (int i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    if (n >= 4) {
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    } else {
        d[0] = d[1];
        d[n - 1] = d[1];
    }
    return GridField(f.grid(), std::move(d), f.time());
}

inline double trapezoid(const GridField& f) {
    double s = 0.0;
    for (int i = 0; i < f.n(); ++i) s += f[i];
    s -= 0.5 * (f[0] + f[f.n() - 1]);
    return s * f.grid().h();
}

inline double max_abs(const GridField& f, int margin = 0) {
    double m = 0.0;
    for (int i = margin; i < f.n() - margin; ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

} // namespace stochmech
