#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "casq/spectra.hpp"

namespace casq {

// Uniformly sampled one-sided correlation, tau_k = k * dtau.
struct CorrelationSeries {
    double dtau = 0.0;
    std::vector<std::complex<double>> values;
    std::vector<double> se; // optional standard errors, empty if exact

    double tau_end() const { return dtau * static_cast<double>(values.size() - 1); }
};

inline CorrelationSeries make_correlation_series(std::span<const double> tau,
                                                 std::span<const std::complex<double>> values) {
    if (tau.size() != values.size() || tau.size() < 2)
        throw std::invalid_argument("correlation series needs matching tau/value arrays, length >= 2");
    if (tau[0] != 0.0) throw std::invalid_argument("correlation grid must start at tau = 0");
    const double h = tau[1] - tau[0];
    if (!(h > 0.0)) throw std::invalid_argument("correlation grid must be increasing");
    for (std::size_t k = 1; k < tau.size(); ++k)
        if (std::abs(tau[k] - tau[k - 1] - h) > 1e-12 * std::max(1.0, std::abs(tau[k])))
            throw std::invalid_argument("correlation grid spacing is not uniform");
    CorrelationSeries s;
    s.dtau = h;
    s.values.assign(values.begin(), values.end());
    return s;
}

enum class TailMode {
    fit_if_needed, // append a fitted exponential tail when the series has not decayed
    fit,           // always append the fitted tail
    none           // no tail; error if the series has not decayed below threshold
};

namespace detail {

// Exact integrals of 1 and s against e^{i w s} over one interval [0, h];
// series form near wh = 0 avoids cancellation.
inline void filon_weights(double w, double h, std::complex<double>& j0,
                          std::complex<double>& j1) {
    const std::complex<double> x(0.0, w * h);
    if (std::abs(w * h) < 0.5) {
        std::complex<double> term{1.0, 0.0}; // x^n / n!
        std::complex<double> s0{0.0, 0.0}, s1{0.0, 0.0};
        for (int n = 0; n < 14; ++n) {
            if (n > 0) term *= x / static_cast<double>(n);
            s0 += term / static_cast<double>(n + 1);
            s1 += term / static_cast<double>(n + 2);
        }
        j0 = h * s0;
        j1 = h * h * s1;
    } else {
        const std::complex<double> iw(0.0, w);
        const std::complex<double> e = std::exp(x);
        j0 = (e - 1.0) / iw;
        j1 = h * e / iw - (e - 1.0) / (iw * iw);
    }
}

struct TailFit {
    bool present = false;
    std::complex<double> amplitude{0.0, 0.0};
    double rate = 0.0; // decay rate lambda
};

// Fits |corr| ~ e^{-lambda tau} over the last decade of decay. Returns an
// empty fit when the data do not support one (non-decaying tail).
inline TailFit fit_exponential_tail(const CorrelationSeries& c) {
    const std::size_t n = c.values.size();
    const double end_mag = std::abs(c.values.back());
    if (end_mag == 0.0) return {};
    // walk back to where the magnitude was ~10x larger
    std::size_t start = n - 1;
    while (start > 0 && std::abs(c.values[start - 1]) <= 10.0 * end_mag) --start;
    if (n - start < 4) start = n >= 8 ? n - 8 : 0;
    // least squares of log|f| on the window; require a clean positive rate
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t k = start; k < n; ++k) {
        const double mag = std::abs(c.values[k]);
        if (mag <= 0.0) return {};
        const double x = static_cast<double>(k) * c.dtau;
        const double y = std::log(mag);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    if (denom <= 0.0) return {};
    const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    if (!(slope < 0.0) || !std::isfinite(slope)) return {};
    TailFit fit;
    fit.present = true;
    fit.rate = -slope;
    fit.amplitude = c.values.back();
    return fit;
}

} // namespace detail

// One-sided transform 2 Re \int_0^inf corr(tau) e^{i w tau} dtau. Piecewise
// linear in corr with the oscillatory factor integrated exactly, so the
// quadrature error is O(h^2) in the sample spacing independent of omega; an
// exponential tail fitted over the last decade closes the truncated part.
inline SpectrumSeries spectrum_from_correlation(const CorrelationSeries& corr,
                                                std::span<const double> omega_grid,
                                                TailMode tail_mode = TailMode::fit_if_needed,
                                                double decay_threshold = 1e-10) {
    if (corr.values.size() < 2 || !(corr.dtau > 0.0))
        throw std::invalid_argument("correlation series too short");
    const double mag0 = std::abs(corr.values.front());
    const double mag_end = std::abs(corr.values.back());
    const bool decayed = mag_end <= decay_threshold * mag0;

    detail::TailFit tail;
    if (tail_mode == TailMode::fit || (tail_mode == TailMode::fit_if_needed && !decayed)) {
        tail = detail::fit_exponential_tail(corr);
        if (!tail.present && !decayed)
            throw std::runtime_error(
                "correlation has not decayed by the grid end and no exponential tail could be fitted");
    } else if (tail_mode == TailMode::none && !decayed) {
        throw std::runtime_error(
            "correlation has not decayed below the threshold by the grid end (tail disabled)");
    }

    SpectrumSeries out;
    out.kind = SpectrumKind::power_cavity;
    out.omega.assign(omega_grid.begin(), omega_grid.end());
    out.values.reserve(out.omega.size());
    const std::size_t n = corr.values.size();
    const double h = corr.dtau;
    const double t_end = corr.tau_end();

    for (double w : out.omega) {
        std::complex<double> j0, j1;
        detail::filon_weights(w, h, j0, j1);
        const std::complex<double> rot = std::exp(std::complex<double>(0.0, w * h));
        std::complex<double> phase{1.0, 0.0};
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const std::complex<double> fk = corr.values[k];
            const std::complex<double> df = corr.values[k + 1] - fk;
            acc += phase * (fk * j0 + df * (j1 / h));
            phase *= rot;
            if ((k & 511u) == 511u)
                phase /= std::abs(phase);
        }
        if (tail.present) {
            const std::complex<double> den(tail.rate, -w);
            acc += tail.amplitude * std::exp(std::complex<double>(0.0, w * t_end)) / den;
        }
        out.values.push_back(2.0 * acc.real());
    }
    return out;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

} // namespace detail

struct ParsevalResult {
    double integral = 0.0;     // \int S(w) dw / 2pi, tails included
    double n_bar = 0.0;        // closed-form steady mean photon number
    double relative_gap = 0.0; // |integral - n_bar| / max(n_bar, tiny)
};

// Numeric identity between the cavity power spectrum and the steady mean
// photon number: adaptive quadrature over ±1000 lambda_plus with analytic
// Lorentzian tail corrections beyond the window.
inline ParsevalResult parseval_check(const SystemParams& p) {
    if (stability_classify(p) != Stability::below)
        throw stability_error("spectrum integral requires operation below threshold");
    const DerivedCoefficients c = derive_coefficients(p);
    const double big_omega = 1000.0 * c.lambda_plus;
    auto f = [&](double w) { return power_spectrum_cavity_at(p, w); };

    const double n_bar = mean_photon_cavity_steady(p);
    const double tol = 1e-11 * std::max(1.0, n_bar);
    // breakpoints matched to the two Lorentzian widths
    std::vector<double> brk = {0.0, c.lambda_minus, 10.0 * c.lambda_minus, c.lambda_plus,
                               10.0 * c.lambda_plus, 100.0 * c.lambda_plus, big_omega};
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i)
        if (brk[i + 1] > brk[i])
            integral += detail::adaptive_simpson(f, brk[i], brk[i + 1], tol);
    integral *= 2.0; // spectrum is even in omega

    // analytic tails of the two Lorentzians beyond the window
    const double w_minus = c.cal_a - c.cal_d + p.epsilon / 2.0;
    const double w_plus = c.cal_a + c.cal_d - p.epsilon / 2.0;
    auto tail = [big_omega](double weight, double lam) {
        return 2.0 * weight / lam * (M_PI / 2.0 - std::atan(big_omega / lam));
    };
    integral += tail(w_minus, c.lambda_minus) + tail(w_plus, c.lambda_plus);

    ParsevalResult r;
    r.integral = integral / (2.0 * M_PI);
    r.n_bar = n_bar;
    r.relative_gap = std::abs(r.integral - r.n_bar) / std::max(r.n_bar, 1e-300);
    return r;
}

} // namespace casq
