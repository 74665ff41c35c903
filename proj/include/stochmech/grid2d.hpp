#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stochmech/grid.hpp"

namespace stochmech {

// Tensor-product 2-D grid; fields are stored row-major with y outer.
struct Grid2D {
    Grid gx;
    Grid gy;

    bool operator==(const Grid2D& o) const { return gx == o.gx && gy == o.gy; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

class GridField2D {
public:
    GridField2D(Grid2D grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.gx.n() * grid_.gy.n())
            throw std::invalid_argument("GridField2D: value count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("GridField2D: non-finite value");
    }

    const Grid2D& grid() const { return grid_; }
    int nx() const { return grid_.gx.n(); }
    int ny() const { return grid_.gy.n(); }
    double at(int ix, int iy) const { return values_[iy * nx() + ix]; }
    double& at(int ix, int iy) { return values_[iy * nx() + ix]; }
    const std::vector<double>& values() const { return values_; }

private:
    Grid2D grid_;
    std::vector<double> values_;
};

inline GridField2D make_field_2d(const Grid2D& g,
                                 const std::function<double(double, double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(g.gx.n()) * g.gy.n());
    for (int iy = 0; iy < g.gy.n(); ++iy)
        for (int ix = 0; ix < g.gx.n(); ++ix)
            v[static_cast<std::size_t>(iy) * g.gx.n() + ix] = f(g.gx.x(ix), g.gy.x(iy));
    return GridField2D(g, std::move(v));
}

namespace detail {
// Second-order d/du along a 1-D line of length n with spacing h, applied via
// an indexed accessor.
template <typename Get, typename Set>
void line_derivative(int n, double h, Get get, Set set) {
    set(0, (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h));
    for (int i = 1; i + 1 < n; ++i) set(i, (get(i + 1) - get(i - 1)) / (2.0 * h));
    set(n - 1, (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h));
}
} // namespace detail

inline GridField2D partial_x(const GridField2D& f) {
    GridField2D out = f;
    for (int iy = 0; iy < f.ny(); ++iy)
        detail::line_derivative(
            f.nx(), f.grid().gx.h(), [&](int i) { return f.at(i, iy); },
            [&](int i, double v) { out.at(i, iy) = v; });
    return out;
}

inline GridField2D partial_y(const GridField2D& f) {
    GridField2D out = f;
    for (int ix = 0; ix < f.nx(); ++ix)
        detail::line_derivative(
            f.ny(), f.grid().gy.h(), [&](int i) { return f.at(ix, i); },
            [&](int i, double v) { out.at(ix, i) = v; });
    return out;
}

// Max |curl| of a 2-D vector field: curl = d(vy)/dx - d(vx)/dy.  For a drift
// sum b + b* built from gradients this vanishes to O(h^2).
inline double check_curl_2d(const GridField2D& vx, const GridField2D& vy) {
    if (vx.grid() != vy.grid())
        throw std::invalid_argument("check_curl_2d: component grids differ");
    GridField2D a = partial_x(vy);
    GridField2D b = partial_y(vx);
    double m = 0.0;
    for (int iy = 0; iy < vx.ny(); ++iy)
        for (int ix = 0; ix < vx.nx(); ++ix)
            m = std::max(m, std::abs(a.at(ix, iy) - b.at(ix, iy)));
    return m;
}

} // namespace stochmech
