#pragma once

#include <cmath>

#include "casq/params.hpp"

namespace casq {

// Coefficients of the composite master equation for the cavity mode, written
// in terms of the physical inputs. cal_a multiplies the 2 a†ρa − aa†ρ − ρaa†
// group, cal_b the 2 aρa† − a†aρ − ρa†a group, and cal_c/cal_d the two
// phase-sensitive a†ρa† + aρa groups. big_b is the pump-saturation
// denominator (1+β²)(1+β²/4); res_n and res_m are the squeezed-reservoir
// photon-number and phase-correlation moments.
struct DerivedCoefficients {
    double cal_a = 0.0;
    double cal_b = 0.0;
    double cal_c = 0.0;
    double cal_d = 0.0;
    double big_b = 1.0;
    double res_n = 0.0;
    double res_m = 0.0;
    double lambda_minus = 0.0;   // decay rate of the plus quadrature
    double lambda_plus = 0.0;    // decay rate of the minus quadrature
    double epsilon_threshold = 0.0;
};

inline double pump_saturation(double beta) {
    return (1.0 + beta * beta) * (1.0 + beta * beta / 4.0);
}

// Threshold amplifier strength: the value of epsilon at which lambda_minus
// vanishes and the plus-quadrature fluctuations lose their restoring force.
inline double threshold_epsilon(const SystemParams& p) {
    const double b = p.beta;
    return p.kappa / 2.0 + p.linear_gain * (2.0 * b - b * b * b) / (4.0 * pump_saturation(b));
}

// Quadrature decay rates in reduced closed form. These equal
// (cal_b - cal_a) ∓ (cal_c - cal_d + epsilon) but avoid the cancellation of
// the large reservoir terms.
inline double lambda_minus_of(const SystemParams& p) {
    const double b = p.beta;
    return p.kappa / 2.0 - p.epsilon +
           p.linear_gain * (2.0 * b - b * b * b) / (4.0 * pump_saturation(b));
}

inline double lambda_plus_of(const SystemParams& p) {
    const double b = p.beta;
    return p.kappa / 2.0 + p.epsilon +
           p.linear_gain * (4.0 * b + b * b * b) / (4.0 * pump_saturation(b));
}

inline DerivedCoefficients derive_coefficients(const SystemParams& p) {
    p.validate();
    DerivedCoefficients c;
    const double b = p.beta;
    c.big_b = pump_saturation(b);
    c.res_n = std::sinh(p.squeeze_r) * std::sinh(p.squeeze_r);
    c.res_m = std::sinh(p.squeeze_r) * std::cosh(p.squeeze_r);
    const double gain = p.linear_gain / (4.0 * c.big_b);
    c.cal_a = p.kappa * c.res_n / 2.0 + gain * (1.0 - 1.5 * b + b * b);
    c.cal_b = p.kappa * (c.res_n + 1.0) / 2.0 + gain * (1.0 + 1.5 * b + b * b);
    c.cal_c = -p.kappa * c.res_m / 2.0 + gain * (-1.0 + b / 2.0 + b * b / 2.0 + b * b * b / 2.0);
    c.cal_d = -p.kappa * c.res_m / 2.0 + gain * (-1.0 - b / 2.0 + b * b / 2.0 - b * b * b / 2.0);
    c.lambda_minus = lambda_minus_of(p);
    c.lambda_plus = lambda_plus_of(p);
    c.epsilon_threshold = threshold_epsilon(p);
    return c;
}

enum class Stability { below, at, above };

// Classification against lambda_minus = 0 with a tolerance proportional to
// kappa, the natural rate scale. Guards against cancellation noise when
// epsilon sits exactly at threshold.
inline Stability stability_classify(const SystemParams& p, double tol_scale = 1e-12) {
    const double tol = tol_scale * p.kappa;
    const double lm = lambda_minus_of(p);
    if (lm > tol) return Stability::below;
    if (lm < -tol) return Stability::above;
    return Stability::at;
}

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::below: return "below";
        case Stability::at: return "at";
        default: return "above";
    }
}

} // namespace casq
