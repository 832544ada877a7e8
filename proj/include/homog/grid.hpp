#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace homog {

/// Uniform periodic grid on the torus [0,L)^d, d in {1,2}.
/// Point x_i = i*h componentwise, h = L/n.
struct Grid {
    int d = 1;
    double L = 1.0;
    int n = 8;

    Grid() = default;
    Grid(int d_, double L_, int n_) : d(d_), L(L_), n(n_) { validate(); }

    void validate() const {
        if (d != 1 && d != 2)
            throw std::invalid_argument("Grid: dimension must be 1 or 2");
        if (!(L > 0.0))
            throw std::invalid_argument("Grid: domain side must be positive");
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("Grid: n must be even and >= 8");
        if (!(spacing() < 1.0))
            throw std::invalid_argument("Grid: spacing h must be < 1");
    }

    double spacing() const { return L / n; }
    std::size_t size() const {
        return d == 1 ? static_cast<std::size_t>(n)
                      : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    /// Cell volume h^d.
    double cell_volume() const { return std::pow(spacing(), d); }

    // Row-major flattening: index = i1*n + i0 for d=2 (i0 varies fastest).
    std::size_t flat(int i0, int i1 = 0) const {
        return static_cast<std::size_t>(i1) * n + i0;
    }
    std::array<int, 2> unflat(std::size_t idx) const {
        if (d == 1) return {static_cast<int>(idx), 0};
        return {static_cast<int>(idx % n), static_cast<int>(idx / n)};
    }
    std::array<double, 2> point(std::size_t idx) const {
        auto ij = unflat(idx);
        return {ij[0] * spacing(), ij[1] * spacing()};
    }

    bool operator==(const Grid&) const = default;
};

/// Real-valued function on a periodic uniform grid.
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

/// Mass pairing h^d * sum(g*h).
inline double mass_pairing(const GridFunction& g, const GridFunction& h) {
    if (g.grid != h.grid)
        throw std::invalid_argument("mass_pairing: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * h[i];
    return g.grid.cell_volume() * s;
}

inline double l2_norm(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s += v * v;
    return std::sqrt(g.grid.cell_volume() * s);
}

inline double linf_norm(const GridFunction& g) {
    double m = 0.0;
    for (double v : g.values) m = std::max(m, std::abs(v));
    return m;
}

/// L2 norm over an axis-aligned window [lo,hi)^d of the torus.
inline double l2_norm_window(const GridFunction& g,
                             const std::array<double, 2>& lo,
                             const std::array<double, 2>& hi) {
    const Grid& gr = g.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = gr.point(i);
        bool inside = true;
        for (int k = 0; k < gr.d; ++k)
            if (x[k] < lo[k] || x[k] >= hi[k]) inside = false;
        if (inside) s += g[i] * g[i];
    }
    return std::sqrt(gr.cell_volume() * s);
}

} // namespace homog
