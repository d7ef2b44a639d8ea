#pragma once

/// @file bubble.hpp
/// @brief The explicit one-parameter extremal family on the half-space:
///        pointwise values, gradients, interior/boundary residuals, the
///        Gaussian weight, the radial cutoff and the weighted test function.
///
/// Everything here is axisymmetric: a point is (rho, xN) with rho = |x'| the
/// radius in the boundary hyperplane and xN >= 0 the height.

#include <cmath>
#include <stdexcept>

#include "hslab/dimension.hpp"

namespace hslab {

/// Point in the closed half-space, reduced to axisymmetric coordinates.
struct HalfSpacePoint {
    double rho;
    double xN;

    HalfSpacePoint(double r, double z) : rho(r), xN(z) {
        if (r < 0.0 || z < 0.0)
            throw std::invalid_argument("half-space point needs rho >= 0 and xN >= 0");
    }
};

/// Parameters of the bubble family: concentration scale eps > 0 and boundary
/// coupling tau >= 0.  The family is
///
///   u(x) = ( eps*sqrt(N(N-2)) / (eps^2 + rho^2 + (xN + eps*tau*x_N0)^2) )^{(N-2)/2}
///
/// with x_N0 = sqrt(N/(N-2)).  k_N = (N(N-2))^{(N-2)/4} is the standard
/// normalization making -Laplacian u = u^{2*-1} exact in the interior.
struct BubbleParams {
    Dimension dim;
    double eps;
    double tau;

    BubbleParams(Dimension d, double e, double t) : dim(d), eps(e), tau(t) {
        if (!(e > 0.0)) throw std::invalid_argument("bubble eps must be positive");
        if (t < 0.0) throw std::invalid_argument("bubble tau must be nonnegative");
    }

    double x_N0() const { return std::sqrt(double(dim.N) / (dim.N - 2.0)); }
    double k_N() const {
        return std::pow(double(dim.N) * (dim.N - 2.0), (dim.N - 2.0) / 4.0);
    }
    /// Denominator eps^2 + rho^2 + (xN + eps*tau*x_N0)^2.
    double denom(const HalfSpacePoint& x) const {
        const double shift = x.xN + eps * tau * x_N0();
        return eps * eps + x.rho * x.rho + shift * shift;
    }
};

inline double bubble_value(const BubbleParams& p, const HalfSpacePoint& x) {
    const double m = (p.dim.N - 2.0) / 2.0;
    return p.k_N() * std::pow(p.eps / p.denom(x), m);
}

struct Gradient2 {
    double d_rho;
    double d_xN;
};

/// Analytic gradient: -(N-2) k_N eps^{(N-2)/2} D^{-N/2} * (rho, xN + eps*tau*x_N0).
inline Gradient2 bubble_gradient(const BubbleParams& p, const HalfSpacePoint& x) {
    const int N = p.dim.N;
    const double D = p.denom(x);
    const double common = -(N - 2.0) * p.k_N() * std::pow(p.eps, (N - 2.0) / 2.0)
                          * std::pow(D, -N / 2.0);
    return {common * x.rho, common * (x.xN + p.eps * p.tau * p.x_N0())};
}

/// Analytic Laplacian; D = denom(x).  Using grad D = 2(rho, shift),
/// |grad D|^2 = 4(D - eps^2) and Lap D = 2N, the power rule collapses to
///   Lap u = -N(N-2) k_N (eps/D)^{(N+2)/2} / eps^... (all eps powers combine).
inline double bubble_laplacian(const BubbleParams& p, const HalfSpacePoint& x) {
    const int N = p.dim.N;
    return -double(N) * (N - 2.0) * p.k_N()
           * std::pow(p.eps / p.denom(x), (N + 2.0) / 2.0);
}

/// Interior residual -Lap u - u^{2*-1}.  Analytically zero; the call exists so
/// tests and the CLI can confirm the cancellation at floating-point level.
/// Points on the boundary belong to boundary_residual instead.
inline double pde_residual(const BubbleParams& p, const HalfSpacePoint& x) {
    if (!(x.xN > 0.0))
        throw std::domain_error("boundary point: use boundary_residual");
    const double u = bubble_value(p, x);
    return -bubble_laplacian(p, x) - std::pow(u, p.dim.two_star() - 1.0);
}

/// Boundary residual (-du/dxN)|_{xN=0} - tau * u(rho,0)^{2_*-1}.
///
/// The exponent is the trace exponent 2_* - 1: with it, both sides carry the
/// coefficient (N(N-2))^{N/4} via (N-2)*x_N0*k_N = k_N^{N/(N-2)}, so the
/// residual vanishes identically.  (The volume exponent 2*-1 cannot balance
/// the normal derivative; see README notes on conventions.)
inline double boundary_residual(const BubbleParams& p, double rho) {
    if (rho < 0.0) throw std::invalid_argument("boundary_residual needs rho >= 0");
    const int N = p.dim.N;
    const HalfSpacePoint x0(rho, 0.0);
    const double D0 = p.denom(x0);
    const double neg_dn = (N - 2.0) * p.k_N() * std::pow(p.eps, (N - 2.0) / 2.0)
                          * (p.eps * p.tau * p.x_N0()) * std::pow(D0, -N / 2.0);
    const double u0 = bubble_value(p, x0);
    return neg_dn - p.tau * std::pow(u0, p.dim.two_lower() - 1.0);
}

/// Gaussian weight K(x) = e^{|x|^2/4}.  Guarded: beyond |x|^2 = 600 the weight
/// is astronomically large and a caller has almost certainly forgotten a
/// cutoff, so we refuse rather than overflow silently.
inline double weight(const HalfSpacePoint& x) {
    const double r2 = x.rho * x.rho + x.xN * x.xN;
    if (r2 > 600.0) throw std::domain_error("weight overflow");
    return std::exp(r2 / 4.0);
}

namespace detail {
/// One-sided C^infinity ramp e^{-1/s} for s > 0, extended by 0.
inline double ramp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
inline double ramp_prime(double s) {
    return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0;
}
} // namespace detail

/// Radial profile of the cutoff at radius t = |x|: 1 for t <= 1, 0 for t >= 2,
/// and the smooth-step a/(a+b) with a = e^{-1/(2-t)}, b = e^{-1/(t-1)} in
/// between.  C^infinity everywhere and strictly decreasing across [1,2].
inline double cutoff_profile(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double a = detail::ramp(2.0 - t);
    const double b = detail::ramp(t - 1.0);
    return a / (a + b);
}

/// dt-derivative of cutoff_profile.
inline double cutoff_profile_prime(double t) {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    const double a = detail::ramp(2.0 - t);
    const double b = detail::ramp(t - 1.0);
    const double ap = -detail::ramp_prime(2.0 - t);
    const double bp = detail::ramp_prime(t - 1.0);
    const double s = a + b;
    return (ap * b - a * bp) / (s * s);
}

inline double cutoff(const HalfSpacePoint& x) {
    return cutoff_profile(std::hypot(x.rho, x.xN));
}

/// Weighted, cutoff test function K^{-1/2} * cutoff * bubble.  Defined for the
/// tau = 1 member of the family only.
inline double test_function(const BubbleParams& p, const HalfSpacePoint& x) {
    if (p.tau != 1.0) throw std::invalid_argument("test function defined for tau=1");
    const double r2 = x.rho * x.rho + x.xN * x.xN;
    return std::exp(-r2 / 8.0) * cutoff(x) * bubble_value(p, x);
}

} // namespace hslab
