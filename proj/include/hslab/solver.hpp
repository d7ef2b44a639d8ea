#pragma once

/// @file solver.hpp
/// @brief Discretization of the weighted functional on the truncated
///        half-strip: stiffness/mass assembly with exact radial moments,
///        Riesz gradients, the first-eigenvalue iteration, the Hardy and
///        Pohozaev checks, the inf-sup (mountain pass) solver, and the
///        mu <= 0 nonexistence certificate.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hslab/fiber.hpp"
#include "hslab/fields.hpp"
#include "hslab/grid.hpp"

namespace hslab {

struct SolverConfig {
    double step = 1.0;        ///< initial relative step of the outer descent
    int max_outer = 5000;
    double grad_tol = 1e-6;   ///< relative to the first gradient norm
    double inner_t_tol = 1e-12;
};

inline void validate(const SolverConfig& cfg) {
    if (!(cfg.step > 0.0) || !(cfg.grad_tol > 0.0) || !(cfg.inner_t_tol > 0.0))
        throw std::invalid_argument("solver tolerances must be positive");
    if (cfg.max_outer < 1)
        throw std::invalid_argument("solver needs at least one outer iteration");
}

namespace solver_detail {

/// Second-order first derivative on a nonuniform 1-D grid, one-sided at the
/// ends; g(k) fetches the k-th sample.
template <typename Get>
double deriv_1d(const std::vector<double>& x, const Get& g, int k) {
    const int n = int(x.size()) - 1;
    if (k > 0 && k < n) {
        const double hl = x[k] - x[k - 1];
        const double hr = x[k + 1] - x[k];
        return (g(k + 1) * hl * hl - g(k - 1) * hr * hr +
                g(k) * (hr * hr - hl * hl)) /
               (hl * hr * (hl + hr));
    }
    if (k == 0) {
        const double h0 = x[1] - x[0];
        const double h1 = x[2] - x[1];
        return -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * g(0) +
               (h0 + h1) / (h0 * h1) * g(1) - h0 / (h1 * (h0 + h1)) * g(2);
    }
    const double h0 = x[n] - x[n - 1];
    const double h1 = x[n - 1] - x[n - 2];
    return (2.0 * h0 + h1) / (h0 * (h0 + h1)) * g(n) -
           (h0 + h1) / (h0 * h1) * g(n - 1) + h0 / (h1 * (h0 + h1)) * g(n - 2);
}

} // namespace solver_detail

/// Edge-based discretization of int K grad u . grad v with lumped node
/// measures; radial moments int rho^{N-2} are integrated exactly per cell.
/// Outer truncation edges are eliminated as homogeneous Dirichlet nodes.
class Discretization {
  public:
    Discretization(const Grid& g, Dimension dim, bool weighted = true)
        : grid_(g), dim_(dim), weighted_(weighted) {
        validate(g);
        rho_ = graded_coordinates(g.R_rho, g.n_rho, g.cluster);
        z_ = graded_coordinates(g.R_xN, g.n_xN, g.cluster);
        omega_ = sphere_area(dim.N - 1);
        const int nr = g.n_rho, nz = g.n_xN;

        const auto moment = [this](double a, double b) {
            const double q = dim_.N - 1.0;
            return (std::pow(b, q) - std::pow(a, q)) / q;
        };
        medge_.resize(nr);
        for (int i = 0; i < nr; ++i) medge_[i] = moment(rho_[i], rho_[i + 1]);
        mrho_.assign(nr + 1, 0.0);
        mrho_[0] = moment(0.0, 0.5 * (rho_[0] + rho_[1]));
        for (int i = 1; i < nr; ++i)
            mrho_[i] = moment(0.5 * (rho_[i - 1] + rho_[i]), 0.5 * (rho_[i] + rho_[i + 1]));
        mrho_[nr] = moment(0.5 * (rho_[nr - 1] + rho_[nr]), rho_[nr]);
        wz_.assign(nz + 1, 0.0);
        wz_[0] = 0.5 * (z_[1] - z_[0]);
        for (int j = 1; j < nz; ++j) wz_[j] = 0.5 * (z_[j + 1] - z_[j - 1]);
        wz_[nz] = 0.5 * (z_[nz] - z_[nz - 1]);

        dof_.assign(size_t(nr + 1) * size_t(nz + 1), -1);
        nred_ = 0;
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nz; ++j) dof_[node(i, j)] = nred_++;

        Kvol_.resize(dof_.size());
        for (int i = 0; i <= nr; ++i)
            for (int j = 0; j <= nz; ++j) Kvol_[node(i, j)] = Kval(rho_[i], z_[j]);

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(size_t(5) * size_t(nred_));
        const auto add_edge = [&](int a, int b, double c) {
            if (a >= 0) trip.emplace_back(a, a, c);
            if (b >= 0) trip.emplace_back(b, b, c);
            if (a >= 0 && b >= 0) {
                trip.emplace_back(a, b, -c);
                trip.emplace_back(b, a, -c);
            }
        };
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j <= nz; ++j) {
                const double h = rho_[i + 1] - rho_[i];
                const double c = omega_ * Kval(0.5 * (rho_[i] + rho_[i + 1]), z_[j]) *
                                 medge_[i] * wz_[j] / (h * h);
                add_edge(dof_[node(i, j)], dof_[node(i + 1, j)], c);
            }
        for (int i = 0; i <= nr; ++i)
            for (int j = 0; j < nz; ++j) {
                const double h = z_[j + 1] - z_[j];
                const double c =
                    omega_ * Kval(rho_[i], 0.5 * (z_[j] + z_[j + 1])) * mrho_[i] / h;
                add_edge(dof_[node(i, j)], dof_[node(i, j + 1)], c);
            }
        A_.resize(nred_, nred_);
        A_.setFromTriplets(trip.begin(), trip.end());
    }

    Discretization(const Discretization&) = delete;
    Discretization& operator=(const Discretization&) = delete;

    const Grid& grid() const { return grid_; }
    Dimension dim() const { return dim_; }
    bool weighted() const { return weighted_; }
    const std::vector<double>& rho() const { return rho_; }
    const std::vector<double>& z() const { return z_; }

    size_t node(int i, int j) const { return size_t(i) * (grid_.n_xN + 1) + j; }
    int dof(int i, int j) const { return dof_[node(i, j)]; }

    /// Lumped measure of node (i,j), weight excluded.
    double volume_weight(int i, int j) const { return omega_ * mrho_[i] * wz_[j]; }
    /// Lumped boundary measure of node (i,0) on the x_N = 0 line.
    double boundary_weight(int i) const { return omega_ * mrho_[i]; }
    double K_at(int i, int j) const { return Kvol_[node(i, j)]; }

    void check_field(const AxisymField& u) const {
        if (u.grid.n_rho != grid_.n_rho || u.grid.n_xN != grid_.n_xN ||
            u.grid.R_rho != grid_.R_rho || u.grid.R_xN != grid_.R_xN ||
            u.grid.cluster != grid_.cluster || u.dim.N != dim_.N)
            throw std::invalid_argument("field grid does not match discretization");
    }

    Eigen::VectorXd reduce(const AxisymField& u) const {
        check_field(u);
        Eigen::VectorXd x(nred_);
        for (int i = 0; i < grid_.n_rho; ++i)
            for (int j = 0; j < grid_.n_xN; ++j) x[dof(i, j)] = u.at(i, j);
        return x;
    }

    AxisymField inject(const Eigen::VectorXd& x) const {
        AxisymField u(grid_, dim_);
        for (int i = 0; i < grid_.n_rho; ++i)
            for (int j = 0; j < grid_.n_xN; ++j) u.at(i, j) = x[dof(i, j)];
        return u;
    }

    double energy_norm_sq(const AxisymField& u) const {
        const Eigen::VectorXd x = reduce(u);
        return x.dot(A_ * x);
    }

    double inner_product_X(const AxisymField& u, const AxisymField& v) const {
        return reduce(u).dot(A_ * reduce(v));
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return A_ * x; }

    Eigen::VectorXd solve_reduced(const Eigen::VectorXd& b) const {
        ensure_factor();
        return llt_.solve(b);
    }

    /// Smallest eigenvalue of the weighted pencil (stiffness, lumped mass)
    /// by inverse-power iteration.
    double rayleigh_min(double tol = 1e-11, int max_iter = 500) const {
        ensure_factor();
        Eigen::VectorXd m(nred_);
        for (int i = 0; i < grid_.n_rho; ++i)
            for (int j = 0; j < grid_.n_xN; ++j)
                m[dof(i, j)] = volume_weight(i, j) * K_at(i, j);

        Eigen::VectorXd x(nred_);
        for (int i = 0; i < grid_.n_rho; ++i)
            for (int j = 0; j < grid_.n_xN; ++j)
                x[dof(i, j)] = std::exp(-(rho_[i] * rho_[i] + z_[j] * z_[j]) / 4.0);
        x /= std::sqrt(x.dot(m.cwiseProduct(x)));

        double prev = 0.0;
        for (int it = 0; it < max_iter; ++it) {
            const Eigen::VectorXd y = llt_.solve(m.cwiseProduct(x));
            x = y / std::sqrt(y.dot(m.cwiseProduct(y)));
            const double q = x.dot(A_ * x) / x.dot(m.cwiseProduct(x));
            if (it > 0 && std::abs(q - prev) <= tol * std::abs(q)) return q;
            prev = q;
        }
        throw std::runtime_error("eigenvalue iteration did not converge");
    }

  private:
    double Kval(double r, double zz) const {
        return weighted_ ? std::exp((r * r + zz * zz) * 0.25) : 1.0;
    }
    void ensure_factor() const {
        if (factored_) return;
        llt_.compute(A_);
        if (llt_.info() != Eigen::Success)
            throw std::runtime_error("stiffness factorization failed");
        factored_ = true;
    }

    Grid grid_;
    Dimension dim_;
    bool weighted_;
    double omega_ = 0.0;
    std::vector<double> rho_, z_, mrho_, wz_, medge_, Kvol_;
    std::vector<int> dof_;
    int nred_ = 0;
    Eigen::SparseMatrix<double> A_;
    mutable Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
    mutable bool factored_ = false;
};

inline double rayleigh_min(Dimension dim, const Grid& grid) {
    return Discretization(grid, dim, true).rayleigh_min();
}

// ===================== functional and gradient =====================

/// Norm totals of a discrete field, ready for the fiber map: S1 = ||u||^2,
/// S2/S3/S4 the weighted volume, trace, and subcritical sums.
struct FieldTotals {
    double S1 = 0.0, S2 = 0.0, S3 = 0.0, S4 = 0.0;
};

inline FieldTotals field_totals(const AxisymField& u, const FunctionalParams& fp,
                                const Discretization& disc, bool positive_part) {
    disc.check_field(u);
    FieldTotals t;
    t.S1 = disc.energy_norm_sq(u);
    const double qv = fp.dim.two_star();
    const double qt = fp.dim.two_lower();
    for (int i = 0; i <= u.grid.n_rho; ++i)
        for (int j = 0; j <= u.grid.n_xN; ++j) {
            const double v = u.at(i, j);
            const double s = positive_part ? std::max(v, 0.0) : std::abs(v);
            if (s == 0.0) continue;
            const double VK = disc.volume_weight(i, j) * disc.K_at(i, j);
            t.S2 += VK * std::pow(s, qv);
            t.S4 += VK * std::pow(s, fp.p);
            if (j == 0)
                t.S3 += disc.boundary_weight(i) * disc.K_at(i, 0) * std::pow(s, qt);
        }
    return t;
}

/// J(u) = ||u||^2/2 - (mu/p) int K|u|^p - (lambda/2*) int K|u|^{2*}
///        - (sqrt(lambda)/2_*) int_boundary K|u|^{2_*}.
/// The default uses |u| (even functional); positive_part switches to the
/// u_+ variant the mountain-pass scheme works with.
inline double functional_value(const AxisymField& u, const FunctionalParams& fp,
                               const Discretization& disc, bool positive_part = false) {
    const FieldTotals t = field_totals(u, fp, disc, positive_part);
    return 0.5 * t.S1 - fp.mu / fp.p * t.S4 - fp.lambda / fp.dim.two_star() * t.S2 -
           std::sqrt(fp.lambda) / fp.dim.two_lower() * t.S3;
}

namespace solver_detail {

inline Eigen::VectorXd gradient_dual(const AxisymField& u, const FunctionalParams& fp,
                                     const Discretization& disc, bool positive_part) {
    Eigen::VectorXd raw = disc.apply(disc.reduce(u));
    const double qv = fp.dim.two_star();
    const double qt = fp.dim.two_lower();
    const double sl = std::sqrt(fp.lambda);
    for (int i = 0; i < u.grid.n_rho; ++i)
        for (int j = 0; j < u.grid.n_xN; ++j) {
            const double v = u.at(i, j);
            const double s = positive_part ? std::max(v, 0.0) : std::abs(v);
            if (s == 0.0) continue;
            const double sgn = positive_part ? 1.0 : (v < 0.0 ? -1.0 : 1.0);
            const double VK = disc.volume_weight(i, j) * disc.K_at(i, j);
            double f = VK * (fp.lambda * std::pow(s, qv - 1.0) +
                             fp.mu * std::pow(s, fp.p - 1.0));
            if (j == 0)
                f += disc.boundary_weight(i) * disc.K_at(i, 0) * sl *
                     std::pow(s, qt - 1.0);
            raw[disc.dof(i, j)] -= sgn * f;
        }
    return raw;
}

} // namespace solver_detail

/// Riesz representative of J'(u) in the int K grad.grad inner product.
inline AxisymField functional_gradient(const AxisymField& u, const FunctionalParams& fp,
                                       const Discretization& disc,
                                       bool positive_part = false) {
    disc.check_field(u);
    return disc.inject(disc.solve_reduced(
        solver_detail::gradient_dual(u, fp, disc, positive_part)));
}

// ===================== Hardy and Pohozaev checks =====================

struct HardyPair {
    double lhs = 0.0; ///< (N^2/4) int u^2
    double rhs = 0.0; ///< int (x . grad u)^2
};

namespace solver_detail {

/// Nodal (d_rho u, d_xN u) by nonuniform finite differences.
inline void nodal_gradient(const AxisymField& u, const std::vector<double>& rho,
                           const std::vector<double>& z, std::vector<double>& du_rho,
                           std::vector<double>& du_z) {
    const int nr = u.grid.n_rho, nz = u.grid.n_xN;
    du_rho.assign(u.values.size(), 0.0);
    du_z.assign(u.values.size(), 0.0);
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j <= nz; ++j) {
            du_rho[u.idx(i, j)] =
                deriv_1d(rho, [&](int k) { return u.at(k, j); }, i);
            du_z[u.idx(i, j)] =
                deriv_1d(z, [&](int k) { return u.at(i, k); }, j);
        }
}

} // namespace solver_detail

/// Unweighted Hardy pair on the discrete field.
inline HardyPair hardy_check(const AxisymField& u) {
    validate(u);
    const Grid& g = u.grid;
    const Discretization plain(g, u.dim, false);
    std::vector<double> dr, dz;
    solver_detail::nodal_gradient(u, plain.rho(), plain.z(), dr, dz);
    HardyPair h;
    double l2 = 0.0;
    for (int i = 0; i <= g.n_rho; ++i)
        for (int j = 0; j <= g.n_xN; ++j) {
            const double V = plain.volume_weight(i, j);
            const double v = u.at(i, j);
            const double xg = plain.rho()[i] * dr[u.idx(i, j)] + plain.z()[j] * dz[u.idx(i, j)];
            l2 += V * v * v;
            h.rhs += V * xg * xg;
        }
    h.lhs = 0.25 * u.dim.N * u.dim.N * l2;
    return h;
}

/// Quadrature Hardy pair for an analytic field.
inline HardyPair hardy_check(const AnalyticField& f, Dimension dim,
                             const QuadratureSpec& spec) {
    HardyPair h;
    h.lhs = 0.25 * dim.N * dim.N *
            integrate_halfspace(
                [&](double rho, double z) {
                    const double v = f.value(rho, z);
                    return v * v;
                },
                dim, spec)
                .value;
    h.rhs = integrate_halfspace(
                [&](double rho, double z) {
                    const Gradient2 g = f.gradient(rho, z);
                    const double xg = rho * g.d_rho + z * g.d_xN;
                    return xg * xg;
                },
                dim, spec)
                .value;
    return h;
}

struct PohozaevReport {
    double id_a2_lhs = 0.0, id_a2_rhs = 0.0;
    double id_a3_lhs = 0.0, id_a3_rhs = 0.0;
    double id_p1_lhs = 0.0, id_p1_rhs = 0.0;
    double hardy_lhs = 0.0, hardy_rhs = 0.0;
};

/// Both sides of the unweighted Pohozaev-type identities
///   (a2)  ||grad u||^2 - int u f(u) - int_b u g(u) = -(N/4) ||u||_2^2
///   (a3)  (N-2)/2 ||grad u||^2 - N int F(u) - (N-1) int_b G(u)
///           = -(1/2) int (x.grad u)^2
///   (p1)  mu (N/p - (N-2)/2) ||u||_p^p
///           = (1/2) int (x.grad u)^2 - N(N-2)/8 ||u||_2^2
/// with f(u) = lambda|u|^{2*-2}u + mu|u|^{p-2}u, g(u) = sqrt(lambda)
/// |u|^{2_*-2}u, F, G their antiderivatives.  All integrals carry no weight.
inline PohozaevReport pohozaev_report(const AxisymField& u, const FunctionalParams& fp,
                                      const Discretization& plain) {
    if (plain.weighted())
        throw std::invalid_argument("pohozaev identities use the unweighted form");
    plain.check_field(u);
    const int N = fp.dim.N;
    const double qv = fp.dim.two_star();
    const double qt = fp.dim.two_lower();
    const double sl = std::sqrt(fp.lambda);

    const double gradsq = plain.energy_norm_sq(u);
    std::vector<double> dr, dz;
    solver_detail::nodal_gradient(u, plain.rho(), plain.z(), dr, dz);

    double l2 = 0.0, uf = 0.0, Fint = 0.0, pnorm = 0.0, xgrad2 = 0.0;
    double ug = 0.0, Gint = 0.0;
    for (int i = 0; i <= u.grid.n_rho; ++i)
        for (int j = 0; j <= u.grid.n_xN; ++j) {
            const double V = plain.volume_weight(i, j);
            const double s = std::abs(u.at(i, j));
            const double xg =
                plain.rho()[i] * dr[u.idx(i, j)] + plain.z()[j] * dz[u.idx(i, j)];
            l2 += V * s * s;
            xgrad2 += V * xg * xg;
            if (s > 0.0) {
                const double sv = std::pow(s, qv);
                const double sp = std::pow(s, fp.p);
                uf += V * (fp.lambda * sv + fp.mu * sp);
                Fint += V * (fp.lambda * sv / qv + fp.mu * sp / fp.p);
                pnorm += V * sp;
                if (j == 0) {
                    const double B = plain.boundary_weight(i);
                    const double st = std::pow(s, qt);
                    ug += B * sl * st;
                    Gint += B * sl * st / qt;
                }
            }
        }

    PohozaevReport r;
    r.id_a2_lhs = gradsq - uf - ug;
    r.id_a2_rhs = -0.25 * N * l2;
    r.id_a3_lhs = 0.5 * (N - 2.0) * gradsq - N * Fint - (N - 1.0) * Gint;
    r.id_a3_rhs = -0.5 * xgrad2;
    r.id_p1_lhs = fp.mu * (N / fp.p - 0.5 * (N - 2.0)) * pnorm;
    r.id_p1_rhs = 0.5 * xgrad2 - 0.125 * N * (N - 2.0) * l2;
    r.hardy_lhs = 0.25 * N * N * l2;
    r.hardy_rhs = xgrad2;
    return r;
}

inline PohozaevReport pohozaev_report(const AxisymField& u, const FunctionalParams& fp) {
    const Discretization plain(u.grid, fp.dim, false);
    return pohozaev_report(u, fp, plain);
}

// ===================== nonexistence certificate =====================

struct NonexistenceCertificate {
    PohozaevReport pohozaev;
    double gap = 0.0;         ///< p1 rhs - p1 lhs, nonnegative up to grid error
    double hardy_floor = 0.0; ///< (N/4) ||u||_2^2, the minimum admissible gap
    double l2_norm_sq = 0.0;
    bool consistent = false;
    std::string verdict;
};

/// For mu <= 0 the p1 identity forces any solution to vanish: its left side
/// is nonpositive while Hardy bounds the right side below by (N/4)||u||_2^2.
/// The certificate evaluates both sides on a candidate and checks that the
/// defect is at least the Hardy floor, i.e. the identity can only balance
/// at ||u|| below grid noise.
inline NonexistenceCertificate nonexistence_certificate(const AxisymField& u,
                                                        const FunctionalParams& fp) {
    if (fp.mu > 0.0)
        throw std::invalid_argument("nonexistence certificate requires mu <= 0");
    NonexistenceCertificate c;
    c.pohozaev = pohozaev_report(u, fp);
    c.gap = c.pohozaev.id_p1_rhs - c.pohozaev.id_p1_lhs;
    c.l2_norm_sq = c.pohozaev.hardy_lhs * 4.0 / (fp.dim.N * fp.dim.N);
    c.hardy_floor = 0.25 * fp.dim.N * c.l2_norm_sq;
    const double slack = 1e-14 * (std::abs(c.pohozaev.id_p1_rhs) +
                                  std::abs(c.pohozaev.id_p1_lhs) + 1.0);
    c.consistent = c.gap + slack >= 0.5 * c.hardy_floor;
    c.verdict = c.consistent ? "consistent with nonexistence" : "inconclusive";
    return c;
}

// ===================== mountain pass =====================

struct MountainPassResult {
    AxisymField u;
    double level = 0.0;
    double t_star = 0.0;
    std::vector<double> levels;     ///< sup_t I(t u) per accepted outer step
    std::vector<double> grad_norms; ///< X-norm of the Riesz gradient at the ray max
    int iterations = 0;
    bool converged = false;
    std::string message;

    explicit MountainPassResult(const Grid& g, Dimension d) : u(g, d) {}
};

/// Fiber curve of a discrete direction: the ray energy I(t u) expressed
/// through the four field totals.
inline FiberCurve field_fiber(const FieldTotals& t, const FunctionalParams& fp) {
    if (!(t.S2 > 0.0) || !(t.S3 > 0.0))
        throw std::runtime_error("mountain pass direction has no positive part");
    FiberCurve c{fp.dim, fp.p, t.S1, fp.lambda * t.S2, std::sqrt(fp.lambda) * t.S3,
                 t.S4, fp.mu};
    return c;
}

/// Inf-sup scheme: alternate the exact 1-D maximization of I(t u) over the
/// ray with a preconditioned descent step on the direction, keeping the
/// levels monotone.  Returns the nonnegative candidate at the final ray
/// maximum; negative parts are truncated at the end.
inline MountainPassResult mountain_pass_solve(const FunctionalParams& fp,
                                              const Grid& grid, const SolverConfig& cfg,
                                              const AxisymField* initial = nullptr) {
    validate(cfg);
    const Discretization disc(grid, fp.dim, true);
    MountainPassResult res(grid, fp.dim);

    AxisymField u = initial ? *initial
                            : sample_field(grid, fp.dim,
                                           make_test_function_field(fp.dim, 0.1));
    disc.check_field(u);
    {
        const double n0 = std::sqrt(disc.energy_norm_sq(u));
        if (!(n0 > 0.0)) throw std::invalid_argument("trivial function");
        for (double& v : u.values) v /= n0;
    }

    double g0 = -1.0;
    for (int it = 0; it < cfg.max_outer; ++it) {
        res.iterations = it + 1;
        const FieldTotals t = field_totals(u, fp, disc, true);
        const FiberMax fm = fiber_max(field_fiber(t, fp), cfg.inner_t_tol);
        if (!std::isfinite(fm.value)) {
            res.message = "divergence detected";
            break;
        }
        res.levels.push_back(fm.value);

        AxisymField w = u;
        for (double& v : w.values) v *= fm.t;
        const AxisymField grad = functional_gradient(w, fp, disc, true);
        const double gn = std::sqrt(disc.inner_product_X(grad, grad));
        res.grad_norms.push_back(gn);
        if (g0 < 0.0) g0 = gn;
        if (gn <= cfg.grad_tol * g0) {
            res.converged = true;
            u = w;
            break;
        }

        const double wn = std::sqrt(disc.energy_norm_sq(w));
        double alpha = cfg.step * wn / std::max(gn, 1e-300);
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            AxisymField cand = w;
            for (size_t m = 0; m < cand.values.size(); ++m)
                cand.values[m] -= alpha * grad.values[m];
            const FieldTotals tc = field_totals(cand, fp, disc, true);
            if (tc.S2 > 0.0 && tc.S3 > 0.0) {
                const double lc =
                    fiber_max(field_fiber(tc, fp), cfg.inner_t_tol).value;
                if (lc <= fm.value - 1e-4 * alpha * gn * gn) {
                    u = cand;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            res.message = "stagnation above grad_tol";
            u = w;
            break;
        }
    }
    if (!res.converged && res.message.empty()) res.message = "max outer iterations reached";

    // Final projection to the ray maximum, then truncate negative parts.
    const FieldTotals t = field_totals(u, fp, disc, true);
    const FiberMax fm = fiber_max(field_fiber(t, fp), cfg.inner_t_tol);
    res.u = u;
    for (double& v : res.u.values) v = std::max(fm.t * v, 0.0);
    const FieldTotals tf = field_totals(res.u, fp, disc, true);
    const FiberMax fmf = fiber_max(field_fiber(tf, fp), cfg.inner_t_tol);
    res.t_star = fmf.t;
    for (double& v : res.u.values) v *= fmf.t;
    res.level = functional_value(res.u, fp, disc, true);
    return res;
}

// ===================== plain descent (collapse probe) =====================

struct DescentResult {
    AxisymField u;
    std::vector<double> J_trace;
    double initial_norm_sq = 0.0;
    double final_norm_sq = 0.0;
    int iterations = 0;

    explicit DescentResult(const Grid& g, Dimension d) : u(g, d) {}
};

/// Unprojected gradient descent on the u_+ functional.  Starting below the
/// mountain-pass barrier with mu <= 0 this drives the field toward zero:
/// with no subcritical gain there is nothing between the trivial state and
/// the barrier for the descent to settle on.
inline DescentResult descend(const FunctionalParams& fp, const Discretization& disc,
                             const AxisymField& start, const SolverConfig& cfg) {
    validate(cfg);
    disc.check_field(start);
    DescentResult res(start.grid, fp.dim);
    res.u = start;
    res.initial_norm_sq = disc.energy_norm_sq(res.u);

    double J = functional_value(res.u, fp, disc, true);
    res.J_trace.push_back(J);
    for (int it = 0; it < cfg.max_outer; ++it) {
        res.iterations = it + 1;
        const AxisymField grad = functional_gradient(res.u, fp, disc, true);
        const double gn2 = disc.inner_product_X(grad, grad);
        if (!(gn2 > 0.0)) break;
        double alpha = cfg.step;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            AxisymField cand = res.u;
            for (size_t m = 0; m < cand.values.size(); ++m)
                cand.values[m] -= alpha * grad.values[m];
            const double Jc = functional_value(cand, fp, disc, true);
            if (Jc <= J - 1e-4 * alpha * gn2) {
                res.u = cand;
                J = Jc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        res.J_trace.push_back(J);
        if (J <= 1e-14) break;
    }
    res.final_norm_sq = disc.energy_norm_sq(res.u);
    return res;
}

} // namespace hslab
