#pragma once

/// @file quadrature.hpp
/// @brief Dimension-reduced quadrature over the half-space and its boundary.
///
/// Every integrand in this project is axisymmetric, so N-dimensional integrals
/// reduce to weighted 2-D integrals,
///
///   int_{R^N_+} f = sphere_area(N-1) * int_0^inf int_0^inf f(rho,xN) rho^{N-2} drho dxN,
///
/// and boundary integrals to the analogous 1-D form.  Two node families cover
/// all cases:
///
///  * compactified: r = s/(1-s) composed with tanh-sinh abscissas in s.  The
///    composition collapses to r = L*e^{pi*sinh t}, which is how it is coded
///    (evaluating s/(1-s) near s = 1 would shred the far-field nodes).
///    Used for integrands living on the whole half-line.
///  * truncated: Gauss-Legendre in u on [0,1] through the graded map
///    r = c*sinh(u*asinh(R/c)), clustering nodes near the origin at scale c.
///    Used for cutoff-supported integrands (support radius R), with c tied to
///    the concentration scale of the integrand.
///
/// Each integral is evaluated at the requested node count and at twice that
/// count; the difference is the error estimate and the finer value is
/// returned.  There is no hidden refinement: callers that need a guarantee
/// escalate themselves (see bubble_constants).

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hslab/bubble.hpp"
#include "hslab/dimension.hpp"

namespace hslab {

struct QuadratureSpec {
    double radial_truncation = 2.0; ///< R for the truncated map (ignored when compactify)
    int nodes_rho = 128;            ///< base node count, rho direction
    int nodes_xN = 128;             ///< base node count, xN direction
    double rel_tol = 1e-9;          ///< convergence target for the unconverged flag
    bool compactify = true;         ///< true: exp-sinh on (0,inf); false: graded [0,R]
    double cluster_scale = 1.0;     ///< length scale of node clustering at the origin

    static QuadratureSpec compactified(int nodes = 128, double tol = 1e-9,
                                       double cluster = 1.0) {
        QuadratureSpec s;
        s.nodes_rho = s.nodes_xN = nodes;
        s.rel_tol = tol;
        s.compactify = true;
        s.cluster_scale = cluster;
        return s;
    }
    static QuadratureSpec truncated(double R, double cluster, int nodes = 160,
                                    double tol = 1e-9) {
        QuadratureSpec s;
        s.radial_truncation = R;
        s.nodes_rho = s.nodes_xN = nodes;
        s.rel_tol = tol;
        s.compactify = false;
        s.cluster_scale = cluster;
        return s;
    }
};

inline void validate(const QuadratureSpec& s) {
    if (!(s.radial_truncation > 0.0))
        throw std::invalid_argument("quadrature truncation must be positive");
    if (s.nodes_rho < 16 || s.nodes_xN < 16)
        throw std::invalid_argument("quadrature needs at least 16 nodes per axis");
    if (!(s.rel_tol > 0.0) || s.rel_tol > 1e-2)
        throw std::invalid_argument("quadrature rel_tol must lie in (0, 1e-2]");
    if (!(s.cluster_scale > 0.0))
        throw std::invalid_argument("quadrature cluster scale must be positive");
}

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long nodes_used = 0;
    bool unconverged = false;
};

/// Surface area of the unit sphere S^{m-1} in R^m: 2 pi^{m/2} / Gamma(m/2).
inline double sphere_area(int m) {
    if (m < 1) throw std::invalid_argument("sphere_area needs m >= 1");
    return 2.0 * std::pow(M_PI, m / 2.0) / std::tgamma(m / 2.0);
}

namespace quad_detail {

struct Rule1D {
    std::vector<double> x; ///< abscissas in r
    std::vector<double> w; ///< weights including the map jacobian
};

/// Gauss-Legendre rule on [-1,1] by Newton iteration on the recurrence.
/// Cached per n; node counts here stay in the hundreds.
inline const Rule1D& legendre_rule(int n) {
    static std::map<int, Rule1D> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[k] = -x;
        r.x[n - 1 - k] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[k] = w;
        r.w[n - 1 - k] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

/// exp-sinh nodes for int_0^inf g(r) dr with r = L e^{pi sinh t}, trapezoid in t.
inline Rule1D exp_sinh_nodes(int n, double L) {
    constexpr double T = 4.0;
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    const double h = 2.0 * T / (n - 1);
    for (int k = 0; k < n; ++k) {
        const double t = -T + k * h;
        const double rr = L * std::exp(M_PI * std::sinh(t));
        double w = rr * M_PI * std::cosh(t) * h;
        if (k == 0 || k == n - 1) w *= 0.5;
        r.x[k] = rr;
        r.w[k] = w;
    }
    return r;
}

/// Graded nodes for int_0^R g(r) dr with r = c sinh(a u), a = asinh(R/c).
inline Rule1D graded_nodes(int n, double R, double c) {
    const double a = std::asinh(R / c);
    const Rule1D& gl = legendre_rule(n);
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int k = 0; k < n; ++k) {
        const double u = 0.5 * (gl.x[k] + 1.0);
        r.x[k] = c * std::sinh(a * u);
        r.w[k] = 0.5 * gl.w[k] * c * a * std::cosh(a * u);
    }
    return r;
}

inline Rule1D make_rule(int n, const QuadratureSpec& s) {
    return s.compactify ? exp_sinh_nodes(n, s.cluster_scale)
                        : graded_nodes(n, s.radial_truncation, s.cluster_scale);
}

inline double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

[[noreturn]] inline void bad_sample() {
    throw std::domain_error("invalid integrand sample");
}

/// Error-estimate floor: below ~1e-14 relative the coarse/fine difference is
/// roundoff jitter, and reporting the floor keeps refinement monotone.
inline double clamp_error(double raw, double value) {
    const double floor = 1e-14 * std::abs(value);
    return raw < floor ? floor : raw;
}

} // namespace quad_detail

/// int_{R^N_+} f for axisymmetric f given as f(rho, xN).
inline IntegralResult integrate_halfspace(const std::function<double(double, double)>& f,
                                          Dimension dim, const QuadratureSpec& spec) {
    validate(spec);
    const double omega = sphere_area(dim.N - 1);
    const int e = dim.N - 2;

    auto pass = [&](int nr, int nz) {
        const auto rr = quad_detail::make_rule(nr, spec);
        const auto zr = quad_detail::make_rule(nz, spec);
        double total = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double mom = rr.w[i] * quad_detail::ipow(rr.x[i], e);
            if (mom == 0.0) continue;
            double row = 0.0;
            for (int j = 0; j < nz; ++j) {
                const double v = f(rr.x[i], zr.x[j]);
                if (!std::isfinite(v)) quad_detail::bad_sample();
                row += zr.w[j] * v;
            }
            total += mom * row;
        }
        return omega * total;
    };

    const double coarse = pass(spec.nodes_rho, spec.nodes_xN);
    const double fine = pass(2 * spec.nodes_rho, 2 * spec.nodes_xN);
    IntegralResult out;
    out.value = fine;
    out.error_estimate = quad_detail::clamp_error(std::abs(fine - coarse), fine);
    out.nodes_used = 4L * spec.nodes_rho * spec.nodes_xN;
    out.unconverged = out.error_estimate > spec.rel_tol * std::abs(fine);
    return out;
}

/// int_{R^{N-1}} g for radial g on the boundary hyperplane.
inline IntegralResult integrate_boundary(const std::function<double(double)>& g,
                                         Dimension dim, const QuadratureSpec& spec) {
    validate(spec);
    const double omega = sphere_area(dim.N - 1);
    const int e = dim.N - 2;

    auto pass = [&](int nr) {
        const auto rr = quad_detail::make_rule(nr, spec);
        double total = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double v = g(rr.x[i]);
            if (!std::isfinite(v)) quad_detail::bad_sample();
            total += rr.w[i] * quad_detail::ipow(rr.x[i], e) * v;
        }
        return omega * total;
    };

    const double coarse = pass(spec.nodes_rho);
    const double fine = pass(2 * spec.nodes_rho);
    IntegralResult out;
    out.value = fine;
    out.error_estimate = quad_detail::clamp_error(std::abs(fine - coarse), fine);
    out.nodes_used = 2L * spec.nodes_rho;
    out.unconverged = out.error_estimate > spec.rel_tol * std::abs(fine);
    return out;
}

} // namespace hslab
