#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "casq/steady_state.hpp"

namespace casq {

// First and second normally-ordered c-number moments of the cavity field.
struct MomentState {
    std::complex<double> mean_alpha{0.0, 0.0};
    std::complex<double> mean_alpha_sq{0.0, 0.0};
    double mean_n = 0.0; // <alpha* alpha>
};

// Closed moment equations: with b = cal_b - cal_a and c = cal_c - cal_d + eps,
//   d<alpha>/dt   = -b <alpha> + c <alpha*>
//   d<alpha^2>/dt = -2b <alpha^2> + 2c <alpha* alpha> + (eps - 2 cal_d)
//   d<alpha* alpha>/dt = -2b <alpha* alpha> + c (<alpha*^2> + <alpha^2>) + 2 cal_a.
inline MomentState moment_rhs(const MomentState& s, const DerivedCoefficients& coeffs,
                              double epsilon) {
    const double b = coeffs.cal_b - coeffs.cal_a;
    const double c = coeffs.cal_c - coeffs.cal_d + epsilon;
    MomentState d;
    d.mean_alpha = -b * s.mean_alpha + c * std::conj(s.mean_alpha);
    d.mean_alpha_sq = -2.0 * b * s.mean_alpha_sq + 2.0 * c * s.mean_n + (epsilon - 2.0 * coeffs.cal_d);
    d.mean_n = -2.0 * b * s.mean_n + c * 2.0 * s.mean_alpha_sq.real() + 2.0 * coeffs.cal_a;
    return d;
}

struct MomentSeries {
    std::vector<double> t;
    std::vector<MomentState> states;
    bool diverged = false; // hit non-finite values (above-threshold blow-up)
};

inline double default_moment_dt(const SystemParams& p) {
    const DerivedCoefficients c = derive_coefficients(p);
    return 1e-3 / std::max({c.lambda_plus, p.kappa, c.cal_a});
}

// Fixed-step classical RK4 from vacuum initial data. Transients are
// well-defined on either side of threshold; a blow-up to non-finite values is
// flagged and the series truncated at the last finite step.
inline MomentSeries integrate_moments(const SystemParams& p, double t_end, double dt,
                                      int sample_stride = 1) {
    if (!(dt > 0.0)) throw std::domain_error("dt must be > 0");
    if (!(t_end >= 0.0)) throw std::domain_error("t_end must be >= 0");
    if (sample_stride < 1) throw std::domain_error("sample stride must be >= 1");
    const DerivedCoefficients coeffs = derive_coefficients(p);
    const double eps = p.epsilon;

    auto add = [](const MomentState& a, const MomentState& b, double w) {
        MomentState r;
        r.mean_alpha = a.mean_alpha + w * b.mean_alpha;
        r.mean_alpha_sq = a.mean_alpha_sq + w * b.mean_alpha_sq;
        r.mean_n = a.mean_n + w * b.mean_n;
        return r;
    };
    auto finite = [](const MomentState& s) {
        return std::isfinite(s.mean_alpha.real()) && std::isfinite(s.mean_alpha.imag()) &&
               std::isfinite(s.mean_alpha_sq.real()) && std::isfinite(s.mean_alpha_sq.imag()) &&
               std::isfinite(s.mean_n);
    };

    MomentSeries out;
    MomentState s; // vacuum
    const long steps = static_cast<long>(std::llround(t_end / dt));
    out.t.push_back(0.0);
    out.states.push_back(s);
    for (long k = 0; k < steps; ++k) {
        const MomentState k1 = moment_rhs(s, coeffs, eps);
        const MomentState k2 = moment_rhs(add(s, k1, dt / 2.0), coeffs, eps);
        const MomentState k3 = moment_rhs(add(s, k2, dt / 2.0), coeffs, eps);
        const MomentState k4 = moment_rhs(add(s, k3, dt), coeffs, eps);
        MomentState next = s;
        next.mean_alpha += dt / 6.0 * (k1.mean_alpha + 2.0 * k2.mean_alpha + 2.0 * k3.mean_alpha + k4.mean_alpha);
        next.mean_alpha_sq += dt / 6.0 * (k1.mean_alpha_sq + 2.0 * k2.mean_alpha_sq + 2.0 * k3.mean_alpha_sq + k4.mean_alpha_sq);
        next.mean_n += dt / 6.0 * (k1.mean_n + 2.0 * k2.mean_n + 2.0 * k3.mean_n + k4.mean_n);
        if (!finite(next)) {
            out.diverged = true;
            break;
        }
        s = next;
        if ((k + 1) % sample_stride == 0 || k + 1 == steps) {
            out.t.push_back(static_cast<double>(k + 1) * dt);
            out.states.push_back(s);
        }
    }
    return out;
}

// Closed-form steady state of the moment equations (vacuum-reachable branch):
// <alpha> = 0, <alpha^2> and <alpha* alpha> from the quadrature moments.
inline MomentState steady_state_moments(const SystemParams& p) {
    const SteadyMoments m = steady_moments(p);
    MomentState s;
    s.mean_alpha_sq = m.mean_alpha_sq;
    s.mean_n = m.mean_n;
    return s;
}

// Quadrature-propagator pair E±(t) = (e^{-lam_- t} ± e^{-lam_+ t})/2.
struct PropagatorPair {
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double e_plus(double t) const {
        return 0.5 * (std::exp(-lambda_minus * t) + std::exp(-lambda_plus * t));
    }
    double e_minus(double t) const {
        return 0.5 * (std::exp(-lambda_minus * t) - std::exp(-lambda_plus * t));
    }
};

inline PropagatorPair propagator_pair(const SystemParams& p) {
    const DerivedCoefficients c = derive_coefficients(p);
    return PropagatorPair{c.lambda_minus, c.lambda_plus};
}

} // namespace casq
