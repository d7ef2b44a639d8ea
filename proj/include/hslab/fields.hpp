#pragma once

/// @file fields.hpp
/// @brief Analytic axisymmetric fields (value + gradient callables), the
///        profile and test-function instances, spatial dilation, and the
///        two-norm Sobolev quotients in unweighted and weighted form.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "hslab/asymptotics.hpp"
#include "hslab/bubble.hpp"
#include "hslab/quadrature.hpp"

namespace hslab {

/// A smooth axisymmetric function of (rho, xN) with an analytic gradient.
struct AnalyticField {
    std::function<double(double, double)> value;
    std::function<Gradient2(double, double)> gradient;
};

inline AnalyticField make_bubble_field(const BubbleParams& bp) {
    return {[bp](double rho, double z) { return bubble_value(bp, {rho, z}); },
            [bp](double rho, double z) { return bubble_gradient(bp, {rho, z}); }};
}

/// The weighted test function K^{-1/2} cutoff u and its exact gradient.
inline AnalyticField make_test_function_field(Dimension dim, double eps) {
    const BubbleParams bp(dim, eps, 1.0);
    return {[bp](double rho, double z) { return test_function(bp, {rho, z}); },
            [bp](double rho, double z) {
                const double w = std::exp(-(rho * rho + z * z) / 8.0);
                const Gradient2 g = asym_detail::shifted_gradient(bp, rho, z);
                return Gradient2{w * g.d_rho, w * g.d_xN};
            }};
}

/// The inverse weight e^{-|x|^2/4}, the minimizer of the weighted Rayleigh
/// quotient.
inline AnalyticField make_gaussian_field() {
    return {[](double rho, double z) { return std::exp(-(rho * rho + z * z) / 4.0); },
            [](double rho, double z) {
                const double v = std::exp(-(rho * rho + z * z) / 4.0);
                return Gradient2{-0.5 * rho * v, -0.5 * z * v};
            }};
}

/// Random smooth compactly supported field: a low-order polynomial (even in
/// rho) under a bump vanishing beyond |x| = 2*scale.  Deterministic given the
/// engine state.
inline AnalyticField random_bump_field(std::mt19937& gen, double scale = 1.0) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double c0 = coef(gen), c1 = coef(gen), c2 = coef(gen), c3 = coef(gen),
                 c4 = coef(gen);
    const double S = scale;
    const auto poly = [=](double rho, double z) {
        return c0 + c1 * rho * rho + c2 * z + c3 * z * z + c4 * rho * rho * z;
    };
    return {[=](double rho, double z) {
                return poly(rho, z) * cutoff_profile(std::hypot(rho, z) / S);
            },
            [=](double rho, double z) {
                const double r = std::hypot(rho, z);
                const double c = cutoff_profile(r / S);
                const double cp =
                    r > 0.0 ? cutoff_profile_prime(r / S) / (S * r) : 0.0;
                const double P = poly(rho, z);
                return Gradient2{(2.0 * c1 * rho + 2.0 * c4 * rho * z) * c + P * cp * rho,
                                 (c2 + 2.0 * c3 * z + c4 * rho * rho) * c + P * cp * z};
            }};
}

/// u(x) -> s^{(N-2)/2} u(sx), the dilation that fixes every term of the
/// quotient exactly.
inline AnalyticField dilate_field(const AnalyticField& u, double s, Dimension dim) {
    if (!(s > 0.0)) throw std::invalid_argument("dilation scale must be positive");
    const double a = std::pow(s, (dim.N - 2.0) / 2.0);
    const double b = std::pow(s, dim.N / 2.0);
    return {[u, s, a](double rho, double z) { return a * u.value(s * rho, s * z); },
            [u, s, b](double rho, double z) {
                const Gradient2 g = u.gradient(s * rho, s * z);
                return Gradient2{b * g.d_rho, b * g.d_xN};
            }};
}

/// ||grad u||^2 / (theta ||u||_{2*}^2 + (1-theta) ||u||_{2_*,boundary}^2),
/// optionally with the exponential weight in every integral.  The weight is
/// only evaluated where the field is nonzero, so compactly supported fields
/// can be integrated on unbounded rules.
inline double sobolev_quotient(const AnalyticField& u, double theta, bool weighted,
                               Dimension dim, const QuadratureSpec& spec) {
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("theta must lie in (0, 1]");

    const auto w = [weighted](double rho, double z) {
        return weighted ? weight(HalfSpacePoint(rho, z)) : 1.0;
    };
    const double num =
        integrate_halfspace(
            [&](double rho, double z) {
                const Gradient2 g = u.gradient(rho, z);
                const double e = g.d_rho * g.d_rho + g.d_xN * g.d_xN;
                if (e == 0.0) return 0.0;
                return w(rho, z) * e;
            },
            dim, spec)
            .value;
    const double qv = dim.two_star();
    const double vol =
        integrate_halfspace(
            [&](double rho, double z) {
                const double v = std::abs(u.value(rho, z));
                if (v == 0.0) return 0.0;
                return w(rho, z) * std::pow(v, qv);
            },
            dim, spec)
            .value;
    const double qt = dim.two_lower();
    const double tr =
        integrate_boundary(
            [&](double rho) {
                const double v = std::abs(u.value(rho, 0.0));
                if (v == 0.0) return 0.0;
                return w(rho, 0.0) * std::pow(v, qt);
            },
            dim, spec)
            .value;

    const double den = theta * std::pow(vol, 2.0 / qv) + (1.0 - theta) * std::pow(tr, 2.0 / qt);
    if (!(den > 0.0)) throw std::runtime_error("trivial function");
    return num / den;
}

/// int K |grad u|^2 / int K u^2, the quotient whose infimum over the weighted
/// space is N/2, attained by the inverse weight e^{-|x|^2/4}.
inline double weighted_rayleigh_quotient(const AnalyticField& u, Dimension dim,
                                         const QuadratureSpec& spec) {
    const double num =
        integrate_halfspace(
            [&](double rho, double z) {
                const Gradient2 g = u.gradient(rho, z);
                const double e = g.d_rho * g.d_rho + g.d_xN * g.d_xN;
                if (e == 0.0) return 0.0;
                return weight(HalfSpacePoint(rho, z)) * e;
            },
            dim, spec)
            .value;
    const double den =
        integrate_halfspace(
            [&](double rho, double z) {
                const double v = u.value(rho, z);
                if (v == 0.0) return 0.0;
                return weight(HalfSpacePoint(rho, z)) * v * v;
            },
            dim, spec)
            .value;
    if (!(den > 0.0)) throw std::runtime_error("trivial function");
    return num / den;
}

/// The balance parameter theta realized by a profile with boundary coupling
/// tau: theta = K2' / (K2' + tau K3') with K2' = ||u||_{2*}^{2*-2} and
/// K3' = ||u||_{2_*,boundary}^{2_*-2}.
inline double bubble_theta(const BubbleParams& bp, const QuadratureSpec& spec) {
    const Dimension dim = bp.dim;
    const double qv = dim.two_star();
    const double qt = dim.two_lower();
    const double vol =
        integrate_halfspace(
            [&](double rho, double z) {
                return std::pow(bubble_value(bp, {rho, z}), qv);
            },
            dim, spec)
            .value;
    const double tr =
        integrate_boundary(
            [&](double rho) { return std::pow(bubble_value(bp, {rho, 0.0}), qt); },
            dim, spec)
            .value;
    const double K2p = std::pow(vol, (qv - 2.0) / qv);
    const double K3p = std::pow(tr, (qt - 2.0) / qt);
    return K2p / (K2p + bp.tau * K3p);
}

} // namespace hslab
