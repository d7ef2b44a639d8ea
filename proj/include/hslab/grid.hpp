#pragma once

/// @file grid.hpp
/// @brief Truncated half-strip grid in axisymmetric coordinates and the
///        discrete field living on it.  Nodes are sinh-graded toward the
///        origin; the outer truncation edges carry homogeneous Dirichlet
///        data while the axis and the x_N = 0 line stay free.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hslab/dimension.hpp"
#include "hslab/fields.hpp"

namespace hslab {

struct Grid {
    double R_rho = 8.0;
    double R_xN = 8.0;
    int n_rho = 96;
    int n_xN = 96;
    double cluster = 1.0; ///< sinh-grading scale; smaller packs nodes at the origin
};

inline void validate(const Grid& g) {
    if (!(g.R_rho > 0.0) || !(g.R_xN > 0.0))
        throw std::invalid_argument("grid truncation radii must be positive");
    if (g.n_rho < 32 || g.n_xN < 32)
        throw std::invalid_argument("grid needs at least 32 cells per direction");
    if (!(g.cluster > 0.0))
        throw std::invalid_argument("grid cluster scale must be positive");
}

/// n+1 coordinates r_i = c sinh(a i/n), a = asinh(R/c): r_0 = 0, r_n = R,
/// spacing ~ (ac/n) near the origin.
inline std::vector<double> graded_coordinates(double R, int n, double cluster) {
    const double a = std::asinh(R / cluster);
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = cluster * std::sinh(a * double(i) / n);
    x[0] = 0.0;
    x[n] = R;
    return x;
}

struct AxisymField {
    Grid grid;
    Dimension dim;
    std::vector<double> values; ///< row-major, index i*(n_xN+1)+j

    AxisymField(const Grid& g, Dimension d)
        : grid(g), dim(d),
          values(size_t(g.n_rho + 1) * size_t(g.n_xN + 1), 0.0) {
        validate(g);
    }

    size_t idx(int i, int j) const { return size_t(i) * (grid.n_xN + 1) + j; }
    double& at(int i, int j) { return values[idx(i, j)]; }
    double at(int i, int j) const { return values[idx(i, j)]; }
};

/// Finite entries everywhere, zeros on the outer truncation edges.
inline void validate(const AxisymField& u) {
    validate(u.grid);
    if (u.values.size() != size_t(u.grid.n_rho + 1) * size_t(u.grid.n_xN + 1))
        throw std::invalid_argument("field storage does not match its grid");
    for (double v : u.values)
        if (!std::isfinite(v)) throw std::invalid_argument("field has nonfinite entries");
    for (int j = 0; j <= u.grid.n_xN; ++j)
        if (u.at(u.grid.n_rho, j) != 0.0)
            throw std::invalid_argument("field must vanish on the outer rho edge");
    for (int i = 0; i <= u.grid.n_rho; ++i)
        if (u.at(i, u.grid.n_xN) != 0.0)
            throw std::invalid_argument("field must vanish on the outer xN edge");
}

/// Nodal sampling with the truncation edges forced to zero.
inline AxisymField sample_field(const Grid& g, Dimension dim, const AnalyticField& f) {
    AxisymField u(g, dim);
    const std::vector<double> rho = graded_coordinates(g.R_rho, g.n_rho, g.cluster);
    const std::vector<double> z = graded_coordinates(g.R_xN, g.n_xN, g.cluster);
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_xN; ++j) u.at(i, j) = f.value(rho[i], z[j]);
    return u;
}

} // namespace hslab
