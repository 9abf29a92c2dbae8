#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "casq/steady_state.hpp"

namespace casq {

enum class SpectrumKind { squeezing_plus, squeezing_minus, power_cavity, power_output };

inline const char* to_string(SpectrumKind k) {
    switch (k) {
        case SpectrumKind::squeezing_plus: return "squeezing_plus";
        case SpectrumKind::squeezing_minus: return "squeezing_minus";
        case SpectrumKind::power_cavity: return "power_cavity";
        default: return "power_output";
    }
}

struct SpectrumSeries {
    std::vector<double> omega;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::power_cavity;
    // set when the plus squeezing spectrum is evaluated at omega = 0 exactly
    // at threshold, where it has no finite value
    std::optional<std::size_t> divergent_index;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    if (n == 1) { g[0] = lo; return g; }
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return g;
}

namespace detail {
inline void require_not_above(const SystemParams& p, const char* what) {
    if (stability_classify(p) == Stability::above)
        throw stability_error(std::string(what) + " requires operation at or below threshold");
}
inline void require_below(const SystemParams& p, const char* what) {
    if (stability_classify(p) != Stability::below)
        throw stability_error(std::string(what) + " requires operation below threshold");
}
} // namespace detail

// Squeezing spectrum of the output mode, plus quadrature:
//   S+(w) = e^{2r} [1 + (2k(eps - A(2b-b^3)/(4B)) + kA(4+b^2)e^{-2r}/(2B)) / (lam_-^2 + w^2)].
// Diverges at w = 0 when at threshold (lam_- = 0).
inline double squeezing_s_plus_at(const SystemParams& p, double omega) {
    detail::require_not_above(p, "squeezing spectrum");
    const double b = p.beta;
    const double big_b = pump_saturation(b);
    const double num = 2.0 * p.kappa * (p.epsilon - p.linear_gain * (2.0 * b - b * b * b) / (4.0 * big_b)) +
                       p.kappa * p.linear_gain * (4.0 + b * b) * std::exp(-2.0 * p.squeeze_r) / (2.0 * big_b);
    const double lm = lambda_minus_of(p);
    const double den = lm * lm + omega * omega;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return std::exp(2.0 * p.squeeze_r) * (1.0 + num / den);
}

// Minus quadrature:
//   S-(w) = e^{-2r} [1 - (2k(eps + A(4b+b^3)/(4B)) - 3kA b^2 e^{2r}/(2B)) / (lam_+^2 + w^2)].
// Reaches 0 exactly at threshold for b = 0, w = 0 (perfect squeezing).
inline double squeezing_s_minus_at(const SystemParams& p, double omega) {
    detail::require_not_above(p, "squeezing spectrum");
    const double b = p.beta;
    const double big_b = pump_saturation(b);
    const double num = 2.0 * p.kappa * (p.epsilon + p.linear_gain * (4.0 * b + b * b * b) / (4.0 * big_b)) -
                       3.0 * p.kappa * p.linear_gain * b * b * std::exp(2.0 * p.squeeze_r) / (2.0 * big_b);
    const double lp = lambda_plus_of(p);
    return std::exp(-2.0 * p.squeeze_r) * (1.0 - num / (lp * lp + omega * omega));
}

inline std::pair<SpectrumSeries, SpectrumSeries>
squeezing_spectrum_output(const SystemParams& p, std::span<const double> omega_grid) {
    detail::require_not_above(p, "squeezing spectrum");
    SpectrumSeries sp, sm;
    sp.kind = SpectrumKind::squeezing_plus;
    sm.kind = SpectrumKind::squeezing_minus;
    sp.omega.assign(omega_grid.begin(), omega_grid.end());
    sm.omega = sp.omega;
    sp.values.reserve(sp.omega.size());
    sm.values.reserve(sm.omega.size());
    const bool at_threshold = stability_classify(p) == Stability::at;
    for (std::size_t i = 0; i < sp.omega.size(); ++i) {
        const double w = sp.omega[i];
        if (at_threshold && w == 0.0) {
            sp.divergent_index = i;
            sp.values.push_back(std::numeric_limits<double>::infinity());
        } else {
            sp.values.push_back(squeezing_s_plus_at(p, w));
        }
        sm.values.push_back(squeezing_s_minus_at(p, w));
    }
    return {std::move(sp), std::move(sm)};
}

// Stationary field autocorrelation <alpha*(t) alpha(t+tau)>: a sum of two
// decaying exponentials with the quadrature decay rates.
inline double autocorrelation_cavity_at(const SystemParams& p, double tau) {
    detail::require_below(p, "stationary autocorrelation");
    if (tau < 0.0) throw std::domain_error("tau must be >= 0");
    const DerivedCoefficients c = derive_coefficients(p);
    const double w_minus = (2.0 * (c.cal_a - c.cal_d) + p.epsilon) / (4.0 * c.lambda_minus);
    const double w_plus = (2.0 * (c.cal_a + c.cal_d) - p.epsilon) / (4.0 * c.lambda_plus);
    return w_minus * std::exp(-c.lambda_minus * tau) + w_plus * std::exp(-c.lambda_plus * tau);
}

inline std::vector<double> autocorrelation_cavity(const SystemParams& p,
                                                  std::span<const double> tau_grid) {
    std::vector<double> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) out.push_back(autocorrelation_cavity_at(p, tau));
    return out;
}

// Power spectrum of the cavity mode: two Lorentzians centred at zero,
//   (cal_a - cal_d + eps/2)/(lam_-^2 + w^2) + (cal_a + cal_d - eps/2)/(lam_+^2 + w^2).
inline double power_spectrum_cavity_at(const SystemParams& p, double omega) {
    detail::require_below(p, "cavity power spectrum");
    const DerivedCoefficients c = derive_coefficients(p);
    return (c.cal_a - c.cal_d + p.epsilon / 2.0) / (c.lambda_minus * c.lambda_minus + omega * omega) +
           (c.cal_a + c.cal_d - p.epsilon / 2.0) / (c.lambda_plus * c.lambda_plus + omega * omega);
}

inline SpectrumSeries power_spectrum_cavity(const SystemParams& p,
                                            std::span<const double> omega_grid) {
    SpectrumSeries s;
    s.kind = SpectrumKind::power_cavity;
    s.omega.assign(omega_grid.begin(), omega_grid.end());
    s.values.reserve(s.omega.size());
    for (double w : s.omega) s.values.push_back(power_spectrum_cavity_at(p, w));
    return s;
}

// Power spectrum of the output mode: both Lorentzians carry the kappa factor,
// with weights reduced by the reservoir cross terms, plus the flat sinh^2 r
// background:
//   k[cal_a - cal_d + eps/2 - lam_-(M+N)]/(lam_-^2+w^2)
// + k[cal_a + cal_d - eps/2 + lam_+(M-N)]/(lam_+^2+w^2) + N.
inline double power_spectrum_output_at(const SystemParams& p, double omega) {
    detail::require_below(p, "output power spectrum");
    detail::require_output_kappa(p);
    const DerivedCoefficients c = derive_coefficients(p);
    const double w1 = p.kappa * (c.cal_a - c.cal_d + p.epsilon / 2.0 -
                                 c.lambda_minus * (c.res_m + c.res_n));
    const double w2 = p.kappa * (c.cal_a + c.cal_d - p.epsilon / 2.0 +
                                 c.lambda_plus * (c.res_m - c.res_n));
    return w1 / (c.lambda_minus * c.lambda_minus + omega * omega) +
           w2 / (c.lambda_plus * c.lambda_plus + omega * omega) + c.res_n;
}

inline SpectrumSeries power_spectrum_output(const SystemParams& p,
                                            std::span<const double> omega_grid) {
    SpectrumSeries s;
    s.kind = SpectrumKind::power_output;
    s.omega.assign(omega_grid.begin(), omega_grid.end());
    s.values.reserve(s.omega.size());
    for (double w : s.omega) s.values.push_back(power_spectrum_output_at(p, w));
    return s;
}

// Half width at half maximum of a spectrum peaked at w = 0, after removing a
// flat background. Bisection on S(w) = S(0)/2 to 1e-6 relative.
inline double hwhm_of_spectrum(const std::function<double(double)>& spectrum,
                               double flat_background = 0.0, double scale_hint = 1.0) {
    const double peak = spectrum(0.0) - flat_background;
    if (!(peak > 0.0))
        throw std::runtime_error("spectrum has no positive peak at omega = 0 after background subtraction");
    const double half = peak / 2.0;
    double hi = scale_hint;
    int expansions = 0;
    while (spectrum(hi) - flat_background > half) {
        hi *= 2.0;
        if (++expansions > 200)
            throw std::runtime_error("spectrum does not decay below half maximum; HWHM undefined");
    }
    double lo = 0.0;
    while (hi - lo > 1e-6 * (0.5 * (hi + lo)) && hi - lo > 1e-300) {
        const double mid = 0.5 * (lo + hi);
        if (spectrum(mid) - flat_background > half)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Convenience overload on sampled data: linear interpolation between grid
// points, grid assumed increasing from 0.
inline double hwhm_of_spectrum(const SpectrumSeries& s, double flat_background = 0.0) {
    if (s.omega.size() < 2) throw std::invalid_argument("series too short for HWHM");
    auto interp = [&s](double w) {
        if (w <= s.omega.front()) return s.values.front();
        if (w >= s.omega.back()) return s.values.back();
        std::size_t i = 1;
        while (s.omega[i] < w) ++i;
        const double t = (w - s.omega[i - 1]) / (s.omega[i] - s.omega[i - 1]);
        return s.values[i - 1] + t * (s.values[i] - s.values[i - 1]);
    };
    const double half = (interp(0.0) - flat_background) / 2.0;
    if (!(half > 0.0))
        throw std::runtime_error("spectrum has no positive peak at omega = 0 after background subtraction");
    if (interp(s.omega.back()) - flat_background > half)
        throw std::runtime_error("sampled spectrum does not decay below half maximum on its grid");
    return hwhm_of_spectrum([&](double w) { return interp(w); }, flat_background,
                            s.omega.back() / 2.0);
}

} // namespace casq
