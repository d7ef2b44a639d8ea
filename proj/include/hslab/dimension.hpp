#pragma once

#include <stdexcept>

namespace hslab {

/// Ambient dimension N >= 3 of the half-space, with the two critical
/// exponents attached: two_star = 2N/(N-2) (volume) and
/// two_lower = 2(N-1)/(N-2) (boundary trace).  They satisfy
/// two_star - 2 == 2*(two_lower - 2), which several closed forms rely on.
struct Dimension {
    int N;

    explicit Dimension(int n) : N(n) {
        if (n < 3) throw std::invalid_argument("dimension must satisfy N >= 3");
    }

    double two_star() const { return 2.0 * N / (N - 2.0); }
    double two_lower() const { return 2.0 * (N - 1.0) / (N - 2.0); }
};

} // namespace hslab
