// Acceptance gate: one criterion per line, exit code = number of failures.
// Each criterion pins its own tolerances and grids; the configurations were
// chosen so that the asymptotic claims are inside their measurable regime on
// a desk-scale machine (see the per-criterion comments).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hslab/hslab.hpp"

using namespace hslab;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool ok = false;
    std::string detail;
};

double rel_gap(double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

// 1. |K1 - K2 - K3| <= 1e-6 K1 for N = 3..6, within 10 s.
Outcome criterion1() {
    const double t0 = now_seconds();
    double worst = 0.0;
    for (int N : {3, 4, 5, 6}) {
        const EnergyBreakdown kb =
            bubble_constants(Dimension(N), QuadratureSpec::compactified(128));
        worst = std::max(worst, std::abs(kb.K1 - kb.K2 - kb.K3) / kb.K1);
    }
    const double dt = now_seconds() - t0;
    return {worst <= 1e-6 && dt <= 10.0,
            strf("max |K1-K2-K3|/K1 = %.2e over N=3..6, %.1f s", worst, dt)};
}

// 2. K1, K2, K3 agree across eps in {0.25, 0.5, 1, 2} to 1e-7 relative.
Outcome criterion2() {
    double worst = 0.0;
    for (int N : {3, 4, 5}) {
        double lo[3], hi[3];
        bool first = true;
        for (double eps : {0.25, 0.5, 1.0, 2.0}) {
            const EnergyBreakdown kb = bubble_constants(
                Dimension(N), QuadratureSpec::compactified(128, 1e-9, eps), eps);
            const double k[3] = {kb.K1, kb.K2, kb.K3};
            for (int i = 0; i < 3; ++i) {
                lo[i] = first ? k[i] : std::min(lo[i], k[i]);
                hi[i] = first ? k[i] : std::max(hi[i], k[i]);
            }
            first = false;
        }
        for (int i = 0; i < 3; ++i) worst = std::max(worst, (hi[i] - lo[i]) / hi[i]);
    }
    return {worst <= 1e-7, strf("max relative spread %.2e over N=3..5", worst)};
}

// 3. Interior PDE residual <= 1e-6 and boundary residual <= 1e-10, relative
//    to the respective nonlinear source, on 200 random points per dimension.
Outcome criterion3() {
    std::mt19937 gen(20260815);
    std::uniform_real_distribution<double> logeps(std::log(0.5), std::log(2.0));
    std::uniform_real_distribution<double> coord(0.0, 2.5);
    double worst_in = 0.0, worst_bd = 0.0;
    for (int N : {3, 4, 5}) {
        const Dimension dim(N);
        for (int k = 0; k < 200; ++k) {
            const BubbleParams bp(dim, std::exp(logeps(gen)), 1.0);
            const HalfSpacePoint x(coord(gen), coord(gen) + 1e-3);
            const double u = bubble_value(bp, x);
            worst_in = std::max(worst_in, std::abs(pde_residual(bp, x)) /
                                              std::pow(u, dim.two_star() - 1.0));
            const double rho = coord(gen);
            const double u0 = bubble_value(bp, {rho, 0.0});
            worst_bd = std::max(worst_bd, std::abs(boundary_residual(bp, rho)) /
                                              std::pow(u0, dim.two_lower() - 1.0));
        }
    }
    return {worst_in <= 1e-6 && worst_bd <= 1e-10,
            strf("interior %.2e (bar 1e-6), boundary %.2e (bar 1e-10)", worst_in,
                 worst_bd)};
}

// 4. Weighted Rayleigh quotient of e^{-|x|^2/4} equals N/2 to 1e-8 by
//    quadrature; discrete minimum within 2% on the default grid and
//    improving under refinement.
Outcome criterion4() {
    double worst = 0.0;
    for (int N : {3, 4, 5}) {
        const double q = weighted_rayleigh_quotient(
            make_gaussian_field(), Dimension(N), QuadratureSpec::truncated(13.0, 2.0, 192));
        worst = std::max(worst, std::abs(q - N / 2.0) / (N / 2.0));
    }
    const Dimension dim(4);
    const double target = 2.0;
    const double coarse = rayleigh_min(dim, Grid{});
    const double fine = rayleigh_min(dim, Grid{8.0, 8.0, 144, 144, 1.0});
    const double dev_c = std::abs(coarse - target) / target;
    const double dev_f = std::abs(fine - target) / target;
    return {worst <= 1e-8 && dev_c <= 0.02 && dev_f < dev_c,
            strf("quadrature dev %.2e; discrete dev %.2e -> %.2e under refinement",
                 worst, dev_c, dev_f)};
}

// 5. Hardy inequality on 100 random compactly supported fields per dimension;
//    the Gaussian saturates rhs/lhs = (N+2)/N, checked at N = 3.
Outcome criterion5() {
    std::mt19937 gen(20260815);
    std::uniform_real_distribution<double> scales(0.5, 2.0);
    int violations = 0;
    double min_ratio = 1e300;
    for (int N : {3, 4, 5}) {
        const Dimension dim(N);
        for (int k = 0; k < 100; ++k) {
            const double S = scales(gen);
            const AnalyticField f = random_bump_field(gen, S);
            const HardyPair h =
                hardy_check(f, dim, QuadratureSpec::truncated(2.0 * S, S, 160));
            if (h.lhs > h.rhs * (1.0 + 1e-9)) ++violations;
            if (h.lhs > 0.0) min_ratio = std::min(min_ratio, h.rhs / h.lhs);
        }
    }
    const HardyPair g = hardy_check(make_gaussian_field(), Dimension(3),
                                    QuadratureSpec::truncated(14.0, 2.0, 192));
    const double dev = std::abs(g.rhs / g.lhs - 5.0 / 3.0) / (5.0 / 3.0);
    return {violations == 0 && dev <= 1e-6,
            strf("0 violations in 300 fields (min rhs/lhs %.3f); Gaussian ratio dev "
                 "%.2e",
                 min_ratio, dev)};
}

// 6. Expansion orders on the ladder {0.1, 0.07, 0.05, 0.035, 0.025}: the
//    smallest rungs that stay clear of quadrature noise while the next-order
//    corrections are already subdominant.
Outcome criterion6() {
    const std::vector<double> lad{0.1, 0.07, 0.05, 0.035, 0.025};
    const QuadratureSpec ref = QuadratureSpec::compactified(128);

    const double t5 = now_seconds();
    const Dimension dim5(5);
    std::vector<double> e5;
    for (double eps : lad)
        e5.push_back(energy_breakdown(eps, 3.0, dim5, expansion_spec(eps)).K1);
    const double K1_5 = bubble_constants(dim5, ref).K1;
    const ExpansionFit f5 = fit_expansion(lad, e5, K1_5, FitModel::eps2());
    const double alpha5 = coefficient_alpha(dim5, ref);
    const double dev5 = std::abs(f5.fitted_coefficient - alpha5) / alpha5;
    const double dt5 = now_seconds() - t5;

    const double t4 = now_seconds();
    const Dimension dim4(4);
    std::vector<double> e4, tr4, sub4;
    for (double eps : lad) {
        const EnergyBreakdown kb = energy_breakdown(eps, 3.0, dim4, expansion_spec(eps));
        e4.push_back(kb.K1);
        tr4.push_back(kb.K3);
        sub4.push_back(kb.K4);
    }
    const EnergyBreakdown kb4 = bubble_constants(dim4, ref);
    const ExpansionFit fe4 = fit_expansion(lad, e4, kb4.K1, FitModel::eps2_log());
    const double log_coeff = 8.0 * M_PI * M_PI;
    const double dev4 = std::abs(fe4.fitted_coefficient - log_coeff) / log_coeff;

    const ExpansionFit ft4 = fit_expansion(lad, tr4, kb4.K3, FitModel::eps2());
    const double gamma4 = coefficient_gamma(dim4, ref);
    const double devg = std::abs(ft4.fitted_coefficient + gamma4) / gamma4;

    const ExpansionFit fs4 = fit_expansion(lad, sub4, 0.0, FitModel::power(1.0));
    const double slope = fs4.fitted_order;
    const double dt4 = now_seconds() - t4;

    const bool ok = dev5 <= 0.05 && dev4 <= 0.10 && devg <= 0.05 &&
                    std::abs(slope - 1.0) <= 0.1 && dt5 <= 300.0 && dt4 <= 300.0;
    return {ok, strf("alpha5 dev %.1f%%, N=4 log-coeff dev %.1f%%, gamma4 dev %.2f%%, "
                     "subcritical slope %.3f; %.0f s + %.0f s",
                     100 * dev5, 100 * dev4, 100 * devg, slope, dt5, dt4)};
}

// 7. closed_form_t against the numeric fiber maximizer on 10^3 random
//    triples; balanced triples give t = 1 exactly.
Outcome criterion7() {
    std::mt19937 gen(20260815);
    std::uniform_real_distribution<double> logk(-2.0, 2.0);
    const int dims[4] = {3, 4, 5, 6};
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const FiberCurve c{Dimension(dims[k % 4]), 3.0, std::exp(logk(gen)),
                           std::exp(logk(gen)), std::exp(logk(gen)), 0.0, 0.0};
        const double t = closed_form_t(c);
        const FiberMax fm = fiber_max(c);
        worst = std::max(worst, std::abs(t - fm.t) / std::max(1.0, t));
    }
    int off_balance = 0;
    for (int k = 0; k < 100; ++k) {
        const double K2 = std::exp(logk(gen)), K3 = std::exp(logk(gen));
        const FiberCurve c{Dimension(dims[k % 4]), 3.0, K2 + K3, K2, K3, 0.0, 0.0};
        if (closed_form_t(c) != 1.0) ++off_balance;
    }
    return {worst <= 1e-8 && off_balance == 0,
            strf("max |t - t_num| = %.2e on 10^3 triples; %d balanced triples off t=1",
                 worst, off_balance)};
}

// 8. Threshold margins A - sup_t g > 0 in all three regimes with the claimed
//    orders.  Each regime runs below its measured crossover eps_0 (the scale
//    where the asymptotically dominant term actually starts to dominate):
//    (i)  N=4, p=3: the eps^2 log eps energy correction has an 8 pi^2
//         coefficient, so mu = 7 pushes the crossover up to eps ~ 0.02 and
//         the ladder sits below it;
//    (ii) N=3, p=5: the energy excess is O(eps) with a coefficient near 29,
//         so the sqrt(eps) subcritical gain needs mu = 16 and rungs around
//         1e-4 before the margin shows its order 3 - p/2 = 0.5;
//    (iii) N=3, p=2.5 with mu = eps^{-1/2}: positivity for every rung <= 0.05.
Outcome criterion8() {
    const ThresholdReport hi = verify_threshold(
        FunctionalParams(Dimension(4), 1.0, 7.0, 3.0),
        {0.014, 0.01, 0.007, 0.005, 0.0035}, 160);
    const ThresholdReport lp = verify_threshold(
        FunctionalParams(Dimension(3), 1.0, 16.0, 5.0),
        {2e-4, 1.4e-4, 1e-4, 7e-5, 5e-5}, 224);
    const ThresholdReport lm = verify_threshold(
        FunctionalParams(Dimension(3), 1.0, 1.0, 2.5),
        {0.04, 0.028, 0.02, 0.014, 0.01}, 128);
    const auto all_positive = [](const ThresholdReport& r) {
        for (const ThresholdRow& row : r.rows)
            if (!(row.margin > 0.0)) return false;
        return true;
    };
    const bool ok = hi.passed && lp.passed && lm.passed && all_positive(hi) &&
                    all_positive(lp) && all_positive(lm);
    return {ok, strf("orders: N=4 fitted %.2f (expect 1.0), N=3 p=5 fitted %.2f "
                     "(expect 0.5), scaled-mu margins positive=%s",
                     hi.fitted_order, lp.fitted_order,
                     all_positive(lm) ? "yes" : "no")};
}

// 9. Riesz gradient vs finite differences; converged mountain-pass candidate
//    at lambda = mu = 1 below A_1 with monotone levels; Pohozaev residuals
//    <= 2% with a two-grid decrease.  The candidate concentrates at scale
//    ~0.09, so both grids grade hard toward the origin (cluster 0.1).
Outcome criterion9() {
    const double t0 = now_seconds();
    const Dimension dim(4);
    const FunctionalParams fp(dim, 1.0, 1.0, 3.0);

    const Grid fd_grid{6.0, 6.0, 32, 32, 1.0};
    const Discretization fd_disc(fd_grid, dim, true);
    std::mt19937 gen(20260815);
    double worst_fd = 0.0;
    for (int k = 0; k < 20; ++k) {
        const AxisymField u = sample_field(fd_grid, dim, random_bump_field(gen, 1.5));
        const AxisymField v = sample_field(fd_grid, dim, random_bump_field(gen, 1.5));
        const AxisymField grad = functional_gradient(u, fp, fd_disc);
        const double h = 1e-4;
        AxisymField up = u, dn = u;
        for (size_t m = 0; m < u.values.size(); ++m) {
            up.values[m] += h * v.values[m];
            dn.values[m] -= h * v.values[m];
        }
        const double fd = (functional_value(up, fp, fd_disc) -
                           functional_value(dn, fp, fd_disc)) /
                          (2 * h);
        const double an = fd_disc.inner_product_X(grad, v);
        worst_fd = std::max(worst_fd,
                            std::abs(fd - an) / std::max(1e-4, std::abs(an)));
    }

    const double A1 = threshold_A_lambda(1.0, dim, QuadratureSpec::compactified(128));
    const auto solve_at = [&](int n) {
        const Grid g{8.0, 8.0, n, n, 0.1};
        const MountainPassResult res = mountain_pass_solve(fp, g, SolverConfig{});
        const Discretization plain(g, dim, false);
        const PohozaevReport rep = pohozaev_report(res.u, fp, plain);
        const double worst = std::max({rel_gap(rep.id_a2_lhs, rep.id_a2_rhs),
                                       rel_gap(rep.id_a3_lhs, rep.id_a3_rhs),
                                       rel_gap(rep.id_p1_lhs, rep.id_p1_rhs)});
        return std::pair<MountainPassResult, double>(res, worst);
    };
    const auto [res, worst192] = solve_at(192);
    bool monotone = true;
    for (size_t k = 1; k < res.levels.size(); ++k)
        if (res.levels[k] > res.levels[k - 1] + 1e-12 * std::abs(res.levels[k - 1]))
            monotone = false;
    const auto [res288, worst288] = solve_at(288);
    const double dt = now_seconds() - t0;

    const bool ok = worst_fd <= 1e-5 && res.converged && monotone &&
                    res.level > 0.0 && res.level < A1 && worst192 <= 0.02 &&
                    res288.converged && worst288 < worst192 && dt <= 600.0;
    return {ok, strf("FD dev %.1e; level %.4f < A1 %.4f, monotone=%s; residuals "
                     "%.2f%% -> %.2f%%; %.0f s",
                     worst_fd, res.level, A1, monotone ? "yes" : "no",
                     100 * worst192, 100 * worst288, dt)};
}

// 10. mu <= 0: strictly positive identity gap on every nontrivial trial and
//     energy collapse of the descent from every tested start.
Outcome criterion10() {
    const Dimension dim(3);
    const Grid g{6.0, 6.0, 48, 48, 1.0};
    std::mt19937 gen(20260815);
    double min_gap = 1e300, worst_collapse = 0.0;
    for (double mu : {0.0, -0.5}) {
        const FunctionalParams fp(dim, 1.0, mu, 3.0);
        for (int k = 0; k < 3; ++k) {
            const AxisymField u = sample_field(g, dim, random_bump_field(gen, 1.2));
            const NonexistenceCertificate c = nonexistence_certificate(u, fp);
            if (!c.consistent) return {false, "certificate inconsistent on a bump"};
            min_gap = std::min(min_gap, c.gap);
        }
        const AxisymField tf = sample_field(g, dim, make_test_function_field(dim, 0.2));
        const NonexistenceCertificate ct = nonexistence_certificate(tf, fp);
        if (!ct.consistent) return {false, "certificate inconsistent on the profile"};
        min_gap = std::min(min_gap, ct.gap);

        const Discretization disc(g, dim, true);
        SolverConfig cfg;
        cfg.max_outer = 400;
        for (double s : {0.3, 0.05}) {
            AxisymField start = tf;
            for (double& v : start.values) v *= s;
            const DescentResult d = descend(fp, disc, start, cfg);
            worst_collapse =
                std::max(worst_collapse, d.final_norm_sq / d.initial_norm_sq);
        }
    }
    return {min_gap > 0.0 && worst_collapse <= 1e-10,
            strf("min gap %.3f > 0; worst descent energy ratio %.1e", min_gap,
                 worst_collapse)};
}

} // namespace

int main() {
    struct Entry {
        const char* label;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> gate = {
        {"constant identity K1 = K2 + K3", criterion1},
        {"scale invariance of the constants", criterion2},
        {"profile solves the PDE and boundary condition", criterion3},
        {"weighted first eigenvalue N/2", criterion4},
        {"Hardy inequality", criterion5},
        {"expansion orders and coefficients", criterion6},
        {"fiber maximizer closed form", criterion7},
        {"threshold margins in three regimes", criterion8},
        {"mountain-pass solver correctness", criterion9},
        {"nonexistence certificate and collapse", criterion10},
    };
    int failures = 0;
    for (size_t k = 0; k < gate.size(); ++k) {
        Outcome r;
        const double t0 = now_seconds();
        try {
            r = gate[k].fn();
        } catch (const std::exception& ex) {
            r = {false, strf("exception: %s", ex.what())};
        }
        const double dt = now_seconds() - t0;
        std::printf("[%s] criterion %zu: %s (%s) [%.1f s]\n", r.ok ? "PASS" : "FAIL",
                    k + 1, gate[k].label, r.detail.c_str(), dt);
        std::fflush(stdout);
        if (!r.ok) ++failures;
    }
    std::printf("%d/10 criteria passed\n", int(gate.size()) - failures);
    return failures;
}
