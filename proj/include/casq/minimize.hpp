#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "casq/spectra.hpp"

namespace casq {

struct MinimizeResult {
    double beta_star = 0.0;
    double value = 0.0;
};

// Coarse grid scan followed by golden-section refinement around the best
// bracket. Ties resolve to the smallest argument (first strict improvement
// wins), so a constant objective returns the left endpoint exactly.
inline MinimizeResult minimize_on_interval(const std::function<double(double)>& f, double lo,
                                           double hi, int coarse_points = 2001,
                                           double x_tol = 1e-5) {
    if (!(hi > lo)) throw std::invalid_argument("minimisation range is empty");
    if (coarse_points < 2) throw std::invalid_argument("coarse grid needs at least 2 points");

    const auto grid = linspace(lo, hi, coarse_points);
    std::size_t best = 0;
    double best_val = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v < best_val) { best_val = v; best = i; }
    }

    // boundary minimum: nothing to bracket
    if (best == 0 || best + 1 == grid.size())
        return {grid[best], best_val};

    double a = grid[best - 1];
    double b = grid[best + 1];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    MinimizeResult r{grid[best], best_val};
    if (f1 < r.value) r = {x1, f1};
    if (f2 < r.value) r = {x2, f2};
    if (fm < r.value) r = {xm, fm};
    return r;
}

// Whether epsilon is held fixed or re-solved to the lasing threshold at each
// swept beta (several reported minima are defined at threshold).
enum class EpsilonRule { fixed, at_threshold };

enum class BetaQuantity {
    cavity_variance_plus,
    cavity_variance_minus,
    output_variance_plus,
    output_variance_minus,
    squeezing_minus_zero_freq,
    mean_photon_steady,
};

inline SystemParams with_beta(const SystemParams& base, double beta, EpsilonRule rule) {
    SystemParams p = base;
    p.beta = beta;
    if (rule == EpsilonRule::at_threshold) p.epsilon = threshold_epsilon(p);
    return p;
}

inline std::function<double(double)> beta_objective(BetaQuantity q, const SystemParams& base,
                                                    EpsilonRule rule) {
    return [q, base, rule](double beta) -> double {
        const SystemParams p = with_beta(base, beta, rule);
        switch (q) {
            case BetaQuantity::cavity_variance_plus: {
                const QuadraturePair v = cavity_variances(p);
                if (v.plus_divergent)
                    throw stability_error("plus-quadrature variance divergent on the scanned range");
                return v.plus;
            }
            case BetaQuantity::cavity_variance_minus:
                return cavity_variances(p).minus;
            case BetaQuantity::output_variance_plus: {
                const QuadraturePair v = output_variances(p);
                if (v.plus_divergent)
                    throw stability_error("plus-quadrature variance divergent on the scanned range");
                return v.plus;
            }
            case BetaQuantity::output_variance_minus:
                return output_variances(p).minus;
            case BetaQuantity::squeezing_minus_zero_freq:
                return squeezing_s_minus_at(p, 0.0);
            case BetaQuantity::mean_photon_steady:
                return mean_photon_cavity_steady(p);
        }
        throw std::logic_error("unhandled quantity");
    };
}

inline MinimizeResult minimize_over_beta(BetaQuantity q, const SystemParams& base,
                                         EpsilonRule rule, double beta_lo, double beta_hi,
                                         int coarse_points = 2001, double beta_tol = 1e-5) {
    return minimize_on_interval(beta_objective(q, base, rule), beta_lo, beta_hi, coarse_points,
                                beta_tol);
}

} // namespace casq
