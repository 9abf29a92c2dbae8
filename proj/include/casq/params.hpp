#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "casq/errors.hpp"

namespace casq {

// Microscopic rates behind the composite gain coefficient. Kept only for
// provenance when a parameter set is built from them; all dynamics use the
// composite parameters below. A single atomic decay rate gamma is shared by
// all three levels.
struct MicroscopicParams {
    double g = 0.0;            // atom-cavity coupling
    double r_a = 0.0;          // atomic injection rate
    double gamma = 1.0;        // atomic decay rate
    double omega_pump = 0.0;   // pump amplitude rate coupling top and bottom levels
    double lambda_pump = 0.0;  // amplifier coupling constant
    double mu = 0.0;           // pump amplitude driving the amplifier
};

// Physical inputs. All rates are plain numbers in one arbitrary inverse-time
// unit; nothing in the model fixes the unit.
struct SystemParams {
    double linear_gain = 0.0;  // A
    double kappa = 1.0;        // cavity damping
    double beta = 0.0;         // pump ratio Omega/gamma
    double epsilon = 0.0;      // amplifier strength lambda*mu
    double squeeze_r = 0.0;    // reservoir squeeze parameter

    std::optional<MicroscopicParams> microscopic;

    void validate() const {
        if (!(kappa > 0.0)) throw std::domain_error("kappa must be > 0");
        if (linear_gain < 0.0) throw std::domain_error("linear gain A must be >= 0");
        if (beta < 0.0) throw std::domain_error("beta must be >= 0");
        if (epsilon < 0.0) throw std::domain_error("epsilon must be >= 0");
        if (squeeze_r < 0.0) throw std::domain_error("squeeze parameter r must be >= 0");
        if (!std::isfinite(linear_gain) || !std::isfinite(kappa) || !std::isfinite(beta) ||
            !std::isfinite(epsilon) || !std::isfinite(squeeze_r))
            throw std::domain_error("parameters must be finite");
    }
};

// Builds the composite parameters from microscopic rates:
// A = 2 g^2 r_a / gamma^2, beta = Omega/gamma, epsilon = lambda*mu.
inline SystemParams from_microscopic(double g, double r_a, double gamma, double omega_pump,
                                     double lambda_pump, double mu, double kappa,
                                     double squeeze_r) {
    if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
    if (!(kappa > 0.0)) throw std::domain_error("kappa must be > 0");
    if (g < 0.0 || r_a < 0.0 || omega_pump < 0.0)
        throw std::domain_error("microscopic rates must be >= 0");
    SystemParams p;
    p.linear_gain = 2.0 * g * g * r_a / (gamma * gamma);
    p.kappa = kappa;
    p.beta = omega_pump / gamma;
    p.epsilon = lambda_pump * mu;
    p.squeeze_r = squeeze_r;
    p.microscopic = MicroscopicParams{g, r_a, gamma, omega_pump, lambda_pump, mu};
    p.validate();
    return p;
}

} // namespace casq
