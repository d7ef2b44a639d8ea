#pragma once

/// @file constants.hpp
/// @brief The scale-invariant bubble constants K1, K2, K3 and the energy
///        threshold A they determine.

#include <cmath>
#include <stdexcept>

#include "hslab/bubble.hpp"
#include "hslab/quadrature.hpp"

namespace hslab {

/// Quadrature totals of one concentration stage.  Produced in two flavors:
///  * bubble_constants fills the eps-free normalization (eps = 1, tau = 1,
///    no cutoff, no weight); there K4 = 0 and p = 0 mean "not computed".
///  * the asymptotics module fills all four totals for the weighted, cutoff
///    test function at a concrete eps (and exponent p for K4).
struct EnergyBreakdown {
    Dimension dim;
    double eps = 1.0;
    double p = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double K3 = 0.0;
    double K4 = 0.0;

    /// A = K1/2 - K2/2* - K3/2_*; equals K2/N + K3/(2(N-1)) when K1 = K2 + K3.
    double threshold_A() const {
        return K1 / 2.0 - K2 / dim.two_star() - K3 / dim.two_lower();
    }
    double threshold_A_lambda(double lambda) const {
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
        return std::pow(lambda, -(dim.N - 2.0) / 2.0) * threshold_A();
    }
};

/// Per-constant quadrature diagnostics from the converged pass.
struct ConstantsErrors {
    IntegralResult grad;
    IntegralResult volume;
    IntegralResult trace;
};

/// K1 = |grad u|^2 over the half-space, K2 = u^{2*} over the half-space,
/// K3 = u^{2_*} over the boundary, all for the eps = 1, tau = 1 bubble.
/// Escalates the node count a few times and refuses to hand back an
/// unconverged result.
inline EnergyBreakdown bubble_constants(Dimension dim, QuadratureSpec spec,
                                        double eps = 1.0,
                                        ConstantsErrors* details = nullptr) {
    if (!spec.compactify)
        throw std::invalid_argument("bubble constants integrate the full half-space; "
                                    "use a compactified spec");
    const BubbleParams bp(dim, eps, 1.0);

    auto grad_sq = [&](double rho, double z) {
        const Gradient2 g = bubble_gradient(bp, HalfSpacePoint(rho, z));
        return g.d_rho * g.d_rho + g.d_xN * g.d_xN;
    };
    auto volume = [&](double rho, double z) {
        return std::pow(bubble_value(bp, HalfSpacePoint(rho, z)), dim.two_star());
    };
    auto trace = [&](double rho) {
        return std::pow(bubble_value(bp, HalfSpacePoint(rho, 0.0)), dim.two_lower());
    };

    for (int attempt = 0;; ++attempt) {
        const IntegralResult i1 = integrate_halfspace(grad_sq, dim, spec);
        const IntegralResult i2 = integrate_halfspace(volume, dim, spec);
        const IntegralResult i3 = integrate_boundary(trace, dim, spec);
        if (!i1.unconverged && !i2.unconverged && !i3.unconverged) {
            if (details) *details = {i1, i2, i3};
            EnergyBreakdown out{dim};
            out.eps = eps;
            out.K1 = i1.value;
            out.K2 = i2.value;
            out.K3 = i3.value;
            return out;
        }
        if (attempt == 3)
            throw std::runtime_error("bubble constants did not converge at the "
                                     "requested tolerance; raise the node budget");
        spec.nodes_rho *= 2;
        spec.nodes_xN *= 2;
    }
}

} // namespace hslab
