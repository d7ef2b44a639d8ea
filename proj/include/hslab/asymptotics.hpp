#pragma once

/// @file asymptotics.hpp
/// @brief Concentration asymptotics of the weighted test function: the four
///        eps-dependent quadrature totals K1(eps)..K4(eps), the expansion
///        coefficients alpha_N, beta_N, gamma_N, C_{1,N}, theta_N, and
///        least-squares ladder fits that confirm the expansion orders.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hslab/constants.hpp"
#include "hslab/quadrature.hpp"

namespace hslab {

// ===================== eps-dependent quadrature totals =====================

/// Truncated spec tuned for cutoff-supported integrands: support radius 2,
/// node clustering at the concentration scale eps.
inline QuadratureSpec expansion_spec(double eps, int nodes = 160, double tol = 1e-9) {
    return QuadratureSpec::truncated(2.0, eps, nodes, tol);
}

namespace asym_detail {

inline void check_eps(double eps) {
    if (!(eps > 0.0) || eps > 0.5)
        throw std::invalid_argument("expansion regime violation: eps must lie in (0, 1/2]");
}

/// Components of grad(K^{-1/2} cutoff u) with the weight factor K^{1/2}
/// multiplied back in, i.e. cutoff*grad u + u*grad cutoff - (x/4)*cutoff*u.
/// The weighted energy density is the squared length of this vector, so the
/// exponential weight cancels exactly and never overflows.
inline Gradient2 shifted_gradient(const BubbleParams& bp, double rho, double z) {
    const HalfSpacePoint x(rho, z);
    const double r = std::hypot(rho, z);
    const double u = bubble_value(bp, x);
    const Gradient2 du = bubble_gradient(bp, x);
    const double c = cutoff_profile(r);
    const double cp = r > 0.0 ? cutoff_profile_prime(r) / r : 0.0;
    return {c * du.d_rho + u * cp * rho - 0.25 * rho * c * u,
            c * du.d_xN + u * cp * z - 0.25 * z * c * u};
}

} // namespace asym_detail

/// ||u_eps||^2 in the weighted space: int K |grad(K^{-1/2} cutoff u)|^2.
inline IntegralResult weighted_energy(double eps, Dimension dim,
                                      const QuadratureSpec& spec) {
    asym_detail::check_eps(eps);
    const BubbleParams bp(dim, eps, 1.0);
    return integrate_halfspace(
        [&](double rho, double z) {
            const Gradient2 g = asym_detail::shifted_gradient(bp, rho, z);
            return g.d_rho * g.d_rho + g.d_xN * g.d_xN;
        },
        dim, spec);
}

/// int K |K^{-1/2} cutoff u|^{2*}; the combined weight K^{1-2*/2} decays.
inline IntegralResult critical_volume_norm(double eps, Dimension dim,
                                           const QuadratureSpec& spec) {
    asym_detail::check_eps(eps);
    const BubbleParams bp(dim, eps, 1.0);
    const double q = dim.two_star();
    const double wexp = (1.0 - q / 2.0) / 4.0; // exponent of |x|^2 in the weight
    return integrate_halfspace(
        [&](double rho, double z) {
            const HalfSpacePoint x(rho, z);
            const double c = cutoff(x);
            if (c == 0.0) return 0.0;
            const double r2 = rho * rho + z * z;
            return std::exp(wexp * r2) * std::pow(c * bubble_value(bp, x), q);
        },
        dim, spec);
}

/// Boundary trace norm int_{xN=0} K |K^{-1/2} cutoff u|^{2_*}.
inline IntegralResult trace_norm(double eps, Dimension dim,
                                 const QuadratureSpec& spec) {
    asym_detail::check_eps(eps);
    const BubbleParams bp(dim, eps, 1.0);
    const double q = dim.two_lower();
    const double wexp = (1.0 - q / 2.0) / 4.0;
    return integrate_boundary(
        [&](double rho) {
            const HalfSpacePoint x(rho, 0.0);
            const double c = cutoff(x);
            if (c == 0.0) return 0.0;
            return std::exp(wexp * rho * rho) * std::pow(c * bubble_value(bp, x), q);
        },
        dim, spec);
}

/// Subcritical norm int K |K^{-1/2} cutoff u|^p for p in (2, 2*).
inline IntegralResult subcritical_norm(double eps, double p, Dimension dim,
                                       const QuadratureSpec& spec) {
    asym_detail::check_eps(eps);
    if (!(p > 2.0) || !(p < dim.two_star()))
        throw std::invalid_argument("subcritical exponent must lie in (2, 2*)");
    const BubbleParams bp(dim, eps, 1.0);
    const double wexp = (1.0 - p / 2.0) / 4.0;
    return integrate_halfspace(
        [&](double rho, double z) {
            const HalfSpacePoint x(rho, z);
            const double c = cutoff(x);
            if (c == 0.0) return 0.0;
            const double r2 = rho * rho + z * z;
            return std::exp(wexp * r2) * std::pow(c * bubble_value(bp, x), p);
        },
        dim, spec);
}

/// All four totals at one eps, packaged for the fiber analysis.
inline EnergyBreakdown energy_breakdown(double eps, double p, Dimension dim,
                                        const QuadratureSpec& spec) {
    EnergyBreakdown out{dim};
    out.eps = eps;
    out.p = p;
    out.K1 = weighted_energy(eps, dim, spec).value;
    out.K2 = critical_volume_norm(eps, dim, spec).value;
    out.K3 = trace_norm(eps, dim, spec).value;
    out.K4 = subcritical_norm(eps, p, dim, spec).value;
    return out;
}

// ===================== expansion coefficients =====================

namespace asym_detail {

/// Escalating wrapper: doubles nodes until the estimate converges.
template <typename F>
double halfspace_to_tol(const F& f, Dimension dim, QuadratureSpec spec) {
    for (int attempt = 0;; ++attempt) {
        const IntegralResult r = integrate_halfspace(f, dim, spec);
        if (!r.unconverged) return r.value;
        if (attempt == 3)
            throw std::runtime_error("coefficient quadrature did not converge");
        spec.nodes_rho *= 2;
        spec.nodes_xN *= 2;
    }
}

template <typename G>
double boundary_to_tol(const G& g, Dimension dim, QuadratureSpec spec) {
    for (int attempt = 0;; ++attempt) {
        const IntegralResult r = integrate_boundary(g, dim, spec);
        if (!r.unconverged) return r.value;
        if (attempt == 3)
            throw std::runtime_error("coefficient quadrature did not converge");
        spec.nodes_rho *= 2;
    }
}

} // namespace asym_detail

/// C_{1,N} = int_{R^N_+} (|y'|^2 + yN(yN + x_N0)) / (1 + |y'|^2 + (yN+x_N0)^2)^{N-1};
/// finite only for N >= 5.
inline double coefficient_C1N(Dimension dim, const QuadratureSpec& spec) {
    if (dim.N < 5)
        throw std::invalid_argument("expansion regime violation: C_{1,N} needs N >= 5");
    const double x0 = std::sqrt(double(dim.N) / (dim.N - 2.0));
    return asym_detail::halfspace_to_tol(
        [&](double rho, double z) {
            const double s = z + x0;
            const double den = 1.0 + rho * rho + s * s;
            return (rho * rho + z * s) * std::pow(den, -(dim.N - 1.0));
        },
        dim, spec);
}

/// alpha_N = (N-2) k_N^2 / 2 * C_{1,N}  (leading energy correction, N >= 5).
inline double coefficient_alpha(Dimension dim, const QuadratureSpec& spec) {
    if (dim.N < 5)
        throw std::invalid_argument("expansion regime violation: alpha_N needs N >= 5");
    const double k = std::pow(double(dim.N) * (dim.N - 2.0), (dim.N - 2.0) / 4.0);
    return 0.5 * (dim.N - 2.0) * k * k * coefficient_C1N(dim, spec);
}

/// beta_N = k_N^{2*} / (2(N-2)) * int_{R^N_+} |y|^2 / (1 + |y'|^2 + (yN+x_N0)^2)^N.
inline double coefficient_beta(Dimension dim, const QuadratureSpec& spec) {
    const double x0 = std::sqrt(double(dim.N) / (dim.N - 2.0));
    const double k = std::pow(double(dim.N) * (dim.N - 2.0), (dim.N - 2.0) / 4.0);
    const double I = asym_detail::halfspace_to_tol(
        [&](double rho, double z) {
            const double s = z + x0;
            const double den = 1.0 + rho * rho + s * s;
            return (rho * rho + z * z) * std::pow(den, -double(dim.N));
        },
        dim, spec);
    return std::pow(k, dim.two_star()) / (2.0 * (dim.N - 2.0)) * I;
}

/// gamma_N = k_N^{2_*} / (4(N-2)) * int_{R^{N-1}} |y'|^2 / (1 + |y'|^2 + x_N0^2)^{N-1};
/// finite only for N >= 4.
inline double coefficient_gamma(Dimension dim, const QuadratureSpec& spec) {
    if (dim.N < 4)
        throw std::invalid_argument("expansion regime violation: gamma_N needs N >= 4");
    const double x0 = std::sqrt(double(dim.N) / (dim.N - 2.0));
    const double k = std::pow(double(dim.N) * (dim.N - 2.0), (dim.N - 2.0) / 4.0);
    const double c = 1.0 + x0 * x0;
    const double I = asym_detail::boundary_to_tol(
        [&](double rho) {
            return rho * rho * std::pow(c + rho * rho, -(dim.N - 1.0));
        },
        dim, spec);
    return std::pow(k, dim.two_lower()) / (4.0 * (dim.N - 2.0)) * I;
}

inline double theta_N(Dimension dim, double p) {
    return dim.N - (dim.N - 2.0) * p / 2.0;
}

struct ExpansionCoefficients {
    double alpha_N;
    double beta_N;
    double gamma_N;
    double C1N;
    double theta_N;
};

/// Full coefficient set; requires N >= 5 so that every member is defined.
inline ExpansionCoefficients expansion_coefficients(Dimension dim, double p,
                                                    const QuadratureSpec& spec) {
    if (dim.N < 5)
        throw std::invalid_argument("expansion regime violation: full coefficient "
                                    "set needs N >= 5");
    ExpansionCoefficients c{};
    c.C1N = coefficient_C1N(dim, spec);
    const double k = std::pow(double(dim.N) * (dim.N - 2.0), (dim.N - 2.0) / 4.0);
    c.alpha_N = 0.5 * (dim.N - 2.0) * k * k * c.C1N;
    c.beta_N = coefficient_beta(dim, spec);
    c.gamma_N = coefficient_gamma(dim, spec);
    c.theta_N = theta_N(dim, p);
    return c;
}

// ===================== ladder fits =====================

/// The fixed ladder used throughout: small enough for the asymptotic regime,
/// large enough that the graded quadrature resolves the eps-scale peak.
inline std::vector<double> standard_ladder() {
    return {0.2, 0.14, 0.1, 0.07, 0.05, 0.035, 0.025};
}

/// Expansion model for (value - limit).  Each model carries one subdominant
/// correction column matching the known remainder order; fitting it alongside
/// the leading term removes the O(eps) coefficient bias a single-column fit
/// would pick up on a ladder whose largest rung is 0.2.
struct FitModel {
    enum class Kind { EPS2, EPS2_LOG, EPS_POWER, EPS_POWER_LOG };
    Kind kind;
    double q = 2.0;

    static FitModel eps2() { return {Kind::EPS2, 2.0}; }
    static FitModel eps2_log() { return {Kind::EPS2_LOG, 2.0}; }
    static FitModel power(double q) { return {Kind::EPS_POWER, q}; }
    static FitModel power_log(double q) { return {Kind::EPS_POWER_LOG, q}; }

    bool has_log() const { return kind == Kind::EPS2_LOG || kind == Kind::EPS_POWER_LOG; }
    double order() const { return kind == Kind::EPS2 || kind == Kind::EPS2_LOG ? 2.0 : q; }

    double leading(double eps) const {
        const double base = std::pow(eps, order());
        return has_log() ? base * std::abs(std::log(eps)) : base;
    }
    double correction(double eps) const {
        switch (kind) {
        case Kind::EPS2: return eps * eps * eps;
        case Kind::EPS2_LOG: return eps * eps;
        case Kind::EPS_POWER: return std::pow(eps, q + 1.0);
        case Kind::EPS_POWER_LOG: return std::pow(eps, q);
        }
        return 0.0;
    }
};

struct ExpansionFit {
    std::vector<double> eps_ladder;
    std::vector<double> lhs_values;
    double limit = 0.0;
    FitModel model = FitModel::eps2();
    double fitted_coefficient = 0.0;   ///< leading-column coefficient
    double correction_coefficient = 0.0;
    double fitted_order = 0.0;         ///< log-log slope, log factor divided out
    double residual = 0.0;             ///< relative RMS misfit
    double condition = 0.0;            ///< design-matrix condition number
    bool ill_conditioned = false;
    bool model_mismatch = false;

    double prediction(double eps) const {
        return limit + fitted_coefficient * model.leading(eps)
             + correction_coefficient * model.correction(eps);
    }
};

/// Least-squares fit of (value - limit) against the model.  The empirical
/// order is the log-log regression slope of |value - limit| (log factor
/// removed for the *_LOG models); a slope more than 10% away from the model
/// order raises the mismatch flag.
inline ExpansionFit fit_expansion(const std::vector<double>& eps_ladder,
                                  const std::vector<double>& values, double limit,
                                  FitModel model) {
    const size_t n = eps_ladder.size();
    if (n < 5) throw std::invalid_argument("expansion fit needs at least 5 rungs");
    if (values.size() != n)
        throw std::invalid_argument("expansion fit: ladder/value size mismatch");
    for (size_t i = 1; i < n; ++i)
        if (!(eps_ladder[i] < eps_ladder[i - 1]))
            throw std::invalid_argument("expansion ladder must be strictly decreasing");
    if (!(eps_ladder.front() >= 4.0 * eps_ladder.back()))
        throw std::invalid_argument("expansion ladder must span a factor of 4");

    ExpansionFit fit;
    fit.eps_ladder = eps_ladder;
    fit.lhs_values = values;
    fit.limit = limit;
    fit.model = model;

    // Normal equations for the two-column design [leading, correction].
    double g11 = 0.0, g12 = 0.0, g22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = values[i] - limit;
        const double m1 = model.leading(eps_ladder[i]);
        const double m2 = model.correction(eps_ladder[i]);
        g11 += m1 * m1;
        g12 += m1 * m2;
        g22 += m2 * m2;
        b1 += d * m1;
        b2 += d * m2;
    }
    const double tr = g11 + g22;
    const double det = g11 * g22 - g12 * g12;
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double lo = 0.5 * (tr - disc);
    fit.condition = lo > 0.0 ? std::sqrt(0.5 * (tr + disc) / lo)
                             : std::numeric_limits<double>::infinity();
    fit.ill_conditioned = !(fit.condition <= 1e8);
    if (fit.ill_conditioned) {
        // Degenerate columns: fall back to the leading term alone.
        fit.fitted_coefficient = g11 > 0.0 ? b1 / g11 : 0.0;
        fit.correction_coefficient = 0.0;
    } else {
        fit.fitted_coefficient = (b1 * g22 - b2 * g12) / det;
        fit.correction_coefficient = (g11 * b2 - g12 * b1) / det;
    }

    // Empirical order from the log-log slope.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    size_t m = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = std::abs(values[i] - limit);
        if (d == 0.0) continue;
        if (model.has_log()) d /= std::abs(std::log(eps_ladder[i]));
        const double lx = std::log(eps_ladder[i]);
        const double ly = std::log(d);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m >= 2) {
        fit.fitted_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        fit.model_mismatch =
            std::abs(fit.fitted_order - model.order()) > 0.1 * model.order();
    }

    double ss = 0.0, sd = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = values[i] - limit;
        const double r = d - (fit.prediction(eps_ladder[i]) - limit);
        ss += r * r;
        sd += d * d;
    }
    fit.residual = sd > 0.0 ? std::sqrt(ss / sd) : 0.0;
    return fit;
}

/// Ladder CSV, one row per rung: eps,value,model_prediction.
inline void write_ladder_csv(const std::string& path, const ExpansionFit& fit) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "eps,value,model_prediction\n";
    out.precision(17);
    for (size_t i = 0; i < fit.eps_ladder.size(); ++i)
        out << fit.eps_ladder[i] << ',' << fit.lhs_values[i] << ','
            << fit.prediction(fit.eps_ladder[i]) << '\n';
}

} // namespace hslab
