#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "casq/moment_ode.hpp"

namespace casq {

// Density-matrix oracle: direct RK4 evolution of the composite master
// equation on Fock levels 0..n_max. Independent of the moment equations; used
// to cross-check them. Operator expectations <a>, <a^2>, <a†a> coincide with
// the normally-ordered c-number moments tracked elsewhere.
struct FockDiagnostics {
    double max_trace_drift = 0.0;        // max |tr(rho) - 1|
    double max_hermiticity_gap = 0.0;    // max |rho - rho†| entrywise
    double min_eigenvalue = 0.0;         // most negative eigenvalue seen
    double final_tail = 0.0;             // population of the top level at t_end
    int n_max = 0;
    double dt = 0.0;
};

struct FockResult {
    std::vector<double> t;
    std::vector<MomentState> moments;
    FockDiagnostics diag;
};

// Default truncation for an expected occupation; squeezing widens the photon
// distribution so this is a starting point, enforced by the tail tolerance.
inline int default_fock_n_max(double nbar_expected) {
    return static_cast<int>(std::ceil(10.0 * nbar_expected + 20.0));
}

namespace detail {

// One evaluation of the master-equation right-hand side. Every term is a
// shifted/scaled copy of rho, so the whole operator is a 9-point stencil:
//   d rho_{m,n} = -[cal_a(m+n+2) + cal_b(m+n)] rho_{m,n}
//     + 2 cal_a s(m)s(n) rho_{m-1,n-1} + 2 cal_b s(m+1)s(n+1) rho_{m+1,n+1}
//     + (eps/2 - cal_d)[s(n)s(n-1) rho_{m,n-2} + s(m)s(m-1) rho_{m-2,n}]
//     - (eps/2 + cal_c)[s(m+1)s(m+2) rho_{m+2,n} + s(n+1)s(n+2) rho_{m,n+2}]
//     + (cal_c + cal_d)[s(m)s(n+1) rho_{m-1,n+1} + s(m+1)s(n) rho_{m+1,n-1}]
// with s(k) = sqrt(k).
inline void master_rhs(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out,
                       const DerivedCoefficients& c, double eps,
                       const std::vector<double>& sq) {
    const int dim = static_cast<int>(rho.rows());
    const double w_lower = eps / 2.0 - c.cal_d;  // rho a^2 and a†^2 rho
    const double w_raise = -(eps / 2.0 + c.cal_c);  // a^2 rho and rho a†^2
    const double w_cross = c.cal_c + c.cal_d;
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            std::complex<double> v = -(c.cal_a * (m + n + 2) + c.cal_b * (m + n)) * rho(m, n);
            if (m >= 1 && n >= 1) v += 2.0 * c.cal_a * sq[m] * sq[n] * rho(m - 1, n - 1);
            if (m + 1 < dim && n + 1 < dim)
                v += 2.0 * c.cal_b * sq[m + 1] * sq[n + 1] * rho(m + 1, n + 1);
            if (n >= 2) v += w_lower * sq[n] * sq[n - 1] * rho(m, n - 2);
            if (m >= 2) v += w_lower * sq[m] * sq[m - 1] * rho(m - 2, n);
            if (m + 2 < dim) v += w_raise * sq[m + 1] * sq[m + 2] * rho(m + 2, n);
            if (n + 2 < dim) v += w_raise * sq[n + 1] * sq[n + 2] * rho(m, n + 2);
            if (m >= 1 && n + 1 < dim) v += w_cross * sq[m] * sq[n + 1] * rho(m - 1, n + 1);
            if (m + 1 < dim && n >= 1) v += w_cross * sq[m + 1] * sq[n] * rho(m + 1, n - 1);
            out(m, n) = v;
        }
    }
}

inline MomentState moments_of(const Eigen::MatrixXcd& rho, const std::vector<double>& sq) {
    const int dim = static_cast<int>(rho.rows());
    MomentState s;
    std::complex<double> a{0.0, 0.0}, a2{0.0, 0.0};
    double n = 0.0;
    // tr(rho a) = sum_m s(m+1) rho_{m+1,m}; tr(rho a^2) analogous two levels down
    for (int m = 0; m + 1 < dim; ++m) a += sq[m + 1] * rho(m + 1, m);
    for (int m = 0; m + 2 < dim; ++m) a2 += sq[m + 1] * sq[m + 2] * rho(m + 2, m);
    for (int m = 1; m < dim; ++m) n += static_cast<double>(m) * rho(m, m).real();
    s.mean_alpha = a;
    s.mean_alpha_sq = a2;
    s.mean_n = n;
    return s;
}

} // namespace detail

// Conservative explicit-RK4 step for the truncated generator, whose spectral
// radius grows like (rate sum) * n_max.
inline double default_fock_dt(const SystemParams& p, int n_max) {
    const DerivedCoefficients c = derive_coefficients(p);
    const double rate = c.cal_a + c.cal_b + std::abs(c.cal_c) + std::abs(c.cal_d) + p.epsilon + p.kappa;
    return 0.5 / (rate * static_cast<double>(n_max + 1));
}

struct FockOptions {
    double dt = 0.0;          // 0 = automatic
    double tail_tol = 1e-8;   // max tolerated top-level population
    bool eigen_checks = true; // positivity diagnostics at checkpoints
    int n_checkpoints = 16;   // moment/diagnostic sampling points
};

inline FockResult fock_evolve(const SystemParams& p, int n_max, double t_end,
                              const FockOptions& opt = {}) {
    if (n_max < 4) throw std::domain_error("n_max must be >= 4");
    if (!(t_end > 0.0)) throw std::domain_error("t_end must be > 0");
    const DerivedCoefficients c = derive_coefficients(p);
    const double dt = opt.dt > 0.0 ? opt.dt : default_fock_dt(p, n_max);
    const int dim = n_max + 1;

    std::vector<double> sq(static_cast<std::size_t>(dim) + 2);
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = std::sqrt(static_cast<double>(k));

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0; // vacuum
    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);

    const long steps = std::max<long>(1, static_cast<long>(std::llround(t_end / dt)));
    const long check_every = std::max<long>(1, steps / std::max(1, opt.n_checkpoints));

    FockResult out;
    out.diag.n_max = n_max;
    out.diag.dt = dt;
    out.diag.min_eigenvalue = 0.0;

    auto run_checks = [&](double t_now) {
        const double tr = rho.trace().real();
        out.diag.max_trace_drift = std::max(out.diag.max_trace_drift, std::abs(tr - 1.0));
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        out.diag.max_hermiticity_gap = std::max(out.diag.max_hermiticity_gap, herm);
        const double tail = rho(dim - 1, dim - 1).real();
        if (tail > opt.tail_tol) {
            const int suggested = static_cast<int>(std::ceil(1.5 * n_max));
            throw truncation_error(
                "Fock truncation too small: top-level population " + std::to_string(tail) +
                    " exceeds tolerance " + std::to_string(opt.tail_tol) + " at t = " +
                    std::to_string(t_now) + "; retry with n_max >= " + std::to_string(suggested),
                suggested);
        }
        if (opt.eigen_checks) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
                (rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
            out.diag.min_eigenvalue =
                std::min(out.diag.min_eigenvalue, es.eigenvalues().minCoeff());
        }
        out.t.push_back(t_now);
        out.moments.push_back(detail::moments_of(rho, sq));
    };

    run_checks(0.0);
    for (long k = 0; k < steps; ++k) {
        detail::master_rhs(rho, k1, c, p.epsilon, sq);
        tmp = rho + (dt / 2.0) * k1;
        detail::master_rhs(tmp, k2, c, p.epsilon, sq);
        tmp = rho + (dt / 2.0) * k2;
        detail::master_rhs(tmp, k3, c, p.epsilon, sq);
        tmp = rho + dt * k3;
        detail::master_rhs(tmp, k4, c, p.epsilon, sq);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % check_every == 0 || k + 1 == steps)
            run_checks(static_cast<double>(k + 1) * dt);
    }
    out.diag.final_tail = rho(dim - 1, dim - 1).real();
    return out;
}

// Steady moments through the Fock oracle: starts from the default truncation
// and escalates by 1.5x whenever the tail tolerance rejects it.
inline FockResult fock_steady_moments(const SystemParams& p, double settle_factor = 7.0,
                                      int n_max_cap = 220, const FockOptions& base_opt = {}) {
    const SteadyMoments target = steady_moments(p);
    const DerivedCoefficients c = derive_coefficients(p);
    const double t_end = settle_factor / c.lambda_minus;
    int n_max = default_fock_n_max(target.mean_n);
    while (true) {
        try {
            return fock_evolve(p, n_max, t_end, base_opt);
        } catch (const truncation_error& e) {
            if (e.required_n_max > n_max_cap) throw;
            n_max = e.required_n_max;
        }
    }
}

} // namespace casq
