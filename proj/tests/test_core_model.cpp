#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "casq/coefficients.hpp"

using namespace casq;
using Catch::Approx;

namespace {

SystemParams make(double a_gain, double kappa, double beta, double r, double eps) {
    SystemParams p;
    p.linear_gain = a_gain;
    p.kappa = kappa;
    p.beta = beta;
    p.squeeze_r = r;
    p.epsilon = eps;
    return p;
}

} // namespace

TEST_CASE("microscopic constructor") {
    SECTION("direct substitution") {
        const SystemParams p = from_microscopic(1.0, 2.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0);
        CHECK(p.linear_gain == Approx(4.0));
        CHECK(p.beta == 0.0);
        CHECK(p.epsilon == 0.0);
        REQUIRE(p.microscopic.has_value());
        CHECK(p.microscopic->r_a == 2.0);
    }
    SECTION("zero coupling gives zero gain regardless of injection rate") {
        const SystemParams p = from_microscopic(0.0, 123.0, 2.0, 0.0, 0.0, 1.0, 1.0, 0.0);
        CHECK(p.linear_gain == 0.0);
    }
    SECTION("hand-evaluated gain") {
        const SystemParams p = from_microscopic(2.0, 12.5, 1.0, 0.022, 0.3, 5.0, 0.8, 1.0);
        CHECK(p.linear_gain == Approx(100.0).epsilon(1e-14));
        CHECK(p.beta == Approx(0.022).epsilon(1e-14));
        CHECK(p.epsilon == Approx(1.5).epsilon(1e-14));
    }
    SECTION("invariant A = 2 g^2 r_a / gamma^2 holds exactly") {
        const SystemParams p = from_microscopic(1.7, 3.3, 2.1, 0.4, 0.2, 1.1, 0.9, 0.5);
        const auto& m = *p.microscopic;
        CHECK(p.linear_gain == 2.0 * m.g * m.g * m.r_a / (m.gamma * m.gamma));
        CHECK(p.beta == m.omega_pump / m.gamma);
    }
    SECTION("domain errors") {
        CHECK_THROWS_AS(from_microscopic(1, 1, 0.0, 0, 0, 1, 1, 0), std::domain_error);
        CHECK_THROWS_AS(from_microscopic(1, 1, 1.0, 0, 0, 1, 0.0, 0), std::domain_error);
        CHECK_THROWS_AS(from_microscopic(-1, 1, 1.0, 0, 0, 1, 1.0, 0), std::domain_error);
    }
}

TEST_CASE("derived coefficients") {
    SECTION("beta = r = eps = 0 reduction") {
        const DerivedCoefficients c = derive_coefficients(make(4, 1, 0, 0, 0));
        CHECK(c.cal_a == Approx(1.0));
        CHECK(c.cal_b == Approx(1.5));
        CHECK(c.cal_c == Approx(-1.0));
        CHECK(c.cal_d == Approx(-1.0));
        CHECK(c.big_b == 1.0);
        CHECK(c.res_n == 0.0);
        CHECK(c.res_m == 0.0);
        CHECK(c.lambda_minus == Approx(0.5));
        CHECK(c.lambda_plus == Approx(0.5));
    }
    SECTION("reservoir moments at r = 1") {
        const DerivedCoefficients c = derive_coefficients(make(4, 1, 0, 1.0, 0));
        CHECK(c.res_n == Approx(1.381098).epsilon(1e-6));
        CHECK(c.res_m == Approx(1.813430).epsilon(1e-6));
    }
    SECTION("lambda_minus vanishes at threshold to machine precision") {
        SystemParams p = make(100, 0.8, 0.022, 1.0, 0);
        p.epsilon = threshold_epsilon(p);
        const DerivedCoefficients c = derive_coefficients(p);
        CHECK(std::abs(c.lambda_minus) < 1e-15);
    }
    SECTION("pure function: identical inputs give bit-identical outputs") {
        const SystemParams p = make(31.7, 0.63, 0.41, 0.87, 0.29);
        const DerivedCoefficients a = derive_coefficients(p);
        const DerivedCoefficients b = derive_coefficients(p);
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
}

TEST_CASE("threshold") {
    SECTION("beta = 0 gives kappa/2") {
        CHECK(threshold_epsilon(make(100, 0.8, 0.0, 0, 0)) == 0.4);
    }
    SECTION("gain term vanishes at beta = sqrt 2") {
        const double b = std::sqrt(2.0);
        CHECK(threshold_epsilon(make(100, 0.8, b, 0, 0)) == Approx(0.4).margin(1e-13));
    }
    SECTION("hand-evaluated value") {
        CHECK(threshold_epsilon(make(100, 0.8, 0.022, 0, 0)) == Approx(1.499069).epsilon(1e-6));
    }
}

TEST_CASE("stability classification") {
    SECTION("no amplifier, no gain: below") {
        CHECK(stability_classify(make(0, 1, 0, 0, 0)) == Stability::below);
    }
    SECTION("at threshold") {
        SystemParams p = make(100, 0.8, 0.022, 1.0, 0);
        p.epsilon = threshold_epsilon(p);
        CHECK(stability_classify(p) == Stability::at);
    }
    SECTION("above threshold") {
        SystemParams p = make(100, 0.8, 0.022, 1.0, 0);
        p.epsilon = threshold_epsilon(p) + 0.1 * p.kappa;
        CHECK(stability_classify(p) == Stability::above);
    }
}

TEST_CASE("coefficient invariants over random parameters") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ua(0.0, 60.0), uk(0.3, 2.0), ub(0.0, 1.3),
        ur(0.0, 2.0), ue(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const SystemParams p = make(ua(rng), uk(rng), ub(rng), ur(rng), ue(rng));
        const DerivedCoefficients c = derive_coefficients(p);

        // M^2 = N (N + 1)
        CHECK(c.res_m * c.res_m ==
              Approx(c.res_n * (c.res_n + 1.0)).epsilon(1e-12).margin(1e-14));

        // B >= 1
        CHECK(c.big_b >= 1.0);

        // decay rates from the coefficient route match the reduced closed form
        const double lm_route = (c.cal_b - c.cal_a) - (c.cal_c - c.cal_d + p.epsilon);
        const double lp_route = (c.cal_b - c.cal_a) + (c.cal_c - c.cal_d + p.epsilon);
        const double scale = std::abs(c.cal_b - c.cal_a) + std::abs(c.cal_c - c.cal_d) + p.epsilon;
        CHECK(std::abs(lm_route - c.lambda_minus) <= 1e-12 * scale);
        CHECK(std::abs(lp_route - c.lambda_plus) <= 1e-12 * scale);

        // threshold is the unique root of the affine map eps -> lambda_minus
        SystemParams q = p;
        q.epsilon = c.epsilon_threshold;
        CHECK(std::abs(lambda_minus_of(q)) < 1e-12 * std::max(1.0, c.epsilon_threshold));
        q.epsilon = c.epsilon_threshold + 0.3;
        CHECK(lambda_minus_of(q) == Approx(-0.3).epsilon(1e-10));
    }
}
