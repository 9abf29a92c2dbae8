#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "casq/coefficients.hpp"

namespace casq {

// Steady-state quadrature variances. `plus` is meaningful only when
// `plus_divergent` is false; at threshold the plus quadrature has no
// stationary value and is flagged instead of returning a non-finite number.
struct QuadraturePair {
    double plus = 1.0;
    double minus = 1.0;
    bool plus_divergent = false;
};

// Steady-state second moments of the quadrature variables alpha± = alpha* ± alpha,
// i.e. (epsilon - 2 cal_d ± 2 cal_a)/lambda∓. plus_sq diverges at threshold.
struct SteadyQuadratureMoments {
    double plus_sq = 0.0;
    double minus_sq = 0.0;
    bool plus_divergent = false;
};

inline SteadyQuadratureMoments steady_quadrature_moments(const SystemParams& p) {
    const Stability st = stability_classify(p);
    if (st == Stability::above)
        throw stability_error("no steady state above threshold (lambda_minus < 0)");
    const DerivedCoefficients c = derive_coefficients(p);
    SteadyQuadratureMoments m;
    m.minus_sq = (p.epsilon - 2.0 * c.cal_d - 2.0 * c.cal_a) / c.lambda_plus;
    if (st == Stability::at) {
        m.plus_divergent = true;
        m.plus_sq = std::numeric_limits<double>::infinity();
    } else {
        m.plus_sq = (p.epsilon - 2.0 * c.cal_d + 2.0 * c.cal_a) / c.lambda_minus;
    }
    return m;
}

// Steady-state first/second field moments: <alpha> = 0 from vacuum,
// <alpha^2> and <alpha* alpha> reconstructed from the quadrature moments.
struct SteadyMoments {
    double mean_n = 0.0;        // <alpha* alpha>
    double mean_alpha_sq = 0.0; // <alpha^2> (real at steady state)
};

inline SteadyMoments steady_moments(const SystemParams& p) {
    if (stability_classify(p) != Stability::below)
        throw stability_error("steady field moments require operation below threshold");
    const SteadyQuadratureMoments q = steady_quadrature_moments(p);
    return SteadyMoments{(q.plus_sq - q.minus_sq) / 4.0, (q.plus_sq + q.minus_sq) / 4.0};
}

namespace detail {
inline void guard_positive_variance(double v, const char* what) {
    if (!(v > 0.0))
        throw physicality_error(std::string(what) +
                                " came out non-positive; expression invalid for these parameters");
}
} // namespace detail

// Cavity quadrature variances 1 ± <alpha±^2>. Valid below threshold; at
// threshold the minus variance remains finite and the plus one is flagged
// divergent.
inline QuadraturePair cavity_variances(const SystemParams& p) {
    const SteadyQuadratureMoments m = steady_quadrature_moments(p);
    QuadraturePair out;
    out.minus = 1.0 - m.minus_sq;
    detail::guard_positive_variance(out.minus, "cavity minus-quadrature variance");
    out.plus_divergent = m.plus_divergent;
    out.plus = m.plus_divergent ? std::numeric_limits<double>::infinity() : 1.0 + m.plus_sq;
    if (!m.plus_divergent)
        detail::guard_positive_variance(out.plus, "cavity plus-quadrature variance");
    return out;
}

namespace detail {
inline void require_output_kappa(const SystemParams& p) {
    if (p.kappa > 1.0)
        throw std::domain_error("output-mode quantities require kappa <= 1 (mirror transmission fraction)");
}
} // namespace detail

// Output quadrature variances through the single-port mirror,
// 1 ± [kappa <alpha±^2> + 2(1-kappa)(M±N)]. The threshold minus-quadrature
// value follows from exact substitution of the threshold condition into the
// general expression (the numerator keeps its kappa factor).
inline QuadraturePair output_variances(const SystemParams& p) {
    detail::require_output_kappa(p);
    const DerivedCoefficients c = derive_coefficients(p);
    const SteadyQuadratureMoments m = steady_quadrature_moments(p);
    QuadraturePair out;
    out.minus = 1.0 - (p.kappa * m.minus_sq + 2.0 * (1.0 - p.kappa) * (c.res_m - c.res_n));
    detail::guard_positive_variance(out.minus, "output minus-quadrature variance");
    out.plus_divergent = m.plus_divergent;
    out.plus = m.plus_divergent
                   ? std::numeric_limits<double>::infinity()
                   : 1.0 + (p.kappa * m.plus_sq + 2.0 * (1.0 - p.kappa) * (c.res_m + c.res_n));
    if (!m.plus_divergent)
        detail::guard_positive_variance(out.plus, "output plus-quadrature variance");
    return out;
}

// Same quantity assembled from the input-output pieces
// kappa <alpha±^2> - 2 kappa (M±N) + 2 (M±N); an independent algebraic route
// used to cross-check output_variances.
inline QuadraturePair output_variances_via_moments(const SystemParams& p) {
    detail::require_output_kappa(p);
    if (stability_classify(p) != Stability::below)
        throw stability_error("moment route requires operation below threshold");
    const DerivedCoefficients c = derive_coefficients(p);
    const SteadyQuadratureMoments m = steady_quadrature_moments(p);
    const double mp = c.res_m + c.res_n;
    const double mm = c.res_m - c.res_n;
    QuadraturePair out;
    out.plus = 1.0 + (p.kappa * m.plus_sq - 2.0 * p.kappa * mp + 2.0 * mp);
    out.minus = 1.0 - (p.kappa * m.minus_sq - 2.0 * p.kappa * mm + 2.0 * mm);
    detail::guard_positive_variance(out.minus, "output minus-quadrature variance (moment route)");
    return out;
}

// Transient mean photon number of the cavity mode from vacuum:
// W- (1 - e^{-2 lambda- t}) + W+ (1 - e^{-2 lambda+ t}) with the noise-integral
// weights W∓ = (2 cal_a ∓ (2 cal_d - epsilon)) / (4 lambda∓).
inline double mean_photon_cavity(const SystemParams& p, double t) {
    if (t < 0.0) throw std::domain_error("time must be >= 0");
    const DerivedCoefficients c = derive_coefficients(p);
    const double num_minus = 2.0 * c.cal_a - 2.0 * c.cal_d + p.epsilon;
    const double num_plus = 2.0 * c.cal_a + 2.0 * c.cal_d - p.epsilon;
    // -expm1 keeps the short-time limit accurate and handles lambda_minus <= 0
    // transients (growth above threshold) without special cases.
    const double gm = -std::expm1(-2.0 * c.lambda_minus * t);
    const double gp = -std::expm1(-2.0 * c.lambda_plus * t);
    double w_minus;
    if (c.lambda_minus != 0.0) {
        w_minus = num_minus / (4.0 * c.lambda_minus) * gm;
    } else {
        w_minus = num_minus / 2.0 * t; // limit of (1-e^{-2 l t})/(4 l) as l -> 0
    }
    return w_minus + num_plus / (4.0 * c.lambda_plus) * gp;
}

inline double mean_photon_cavity_steady(const SystemParams& p) {
    if (stability_classify(p) != Stability::below)
        throw stability_error("steady mean photon number requires operation below threshold");
    const DerivedCoefficients c = derive_coefficients(p);
    return (2.0 * c.cal_a - 2.0 * c.cal_d + p.epsilon) / (4.0 * c.lambda_minus) +
           (2.0 * c.cal_a + 2.0 * c.cal_d - p.epsilon) / (4.0 * c.lambda_plus);
}

// Output-mode mean photon number: kappa nbar + (1-kappa) N.
inline double mean_photon_output(const SystemParams& p, double t) {
    detail::require_output_kappa(p);
    const double n = std::sinh(p.squeeze_r) * std::sinh(p.squeeze_r);
    return p.kappa * mean_photon_cavity(p, t) + (1.0 - p.kappa) * n;
}

inline double mean_photon_output_steady(const SystemParams& p) {
    detail::require_output_kappa(p);
    const double n = std::sinh(p.squeeze_r) * std::sinh(p.squeeze_r);
    return p.kappa * mean_photon_cavity_steady(p) + (1.0 - p.kappa) * n;
}

} // namespace casq
