#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "phonon/collision.hpp"
#include "phonon/errors.hpp"
#include "phonon/kernel.hpp"
#include "phonon/linop.hpp"

using namespace phonon;

namespace {

constexpr double tol = 1e-10;

Density random_density(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::array<double, 6> c;
    for (double& x : c) x = u(rng);
    return [c](double k) {
        double e = 0.0;
        for (int m = 1; m <= 3; ++m) e += c[2 * m - 2] * std::cos(2 * pi * m * k) + c[2 * m - 1] * std::sin(2 * pi * m * k);
        return std::exp(e);
    };
}

const std::vector<double> sample_k{-0.47, -0.33, -0.21, -0.08, -0.02, 0.03, 0.11, 0.19, 0.26, 0.31,
                                   0.38, 0.44, 0.49, -0.4, -0.15, 0.07, 0.22, 0.35, -0.27, 0.41};

}  // namespace

TEST_CASE("equilibrium family is annihilated") {
    for (double a : {0.0, 0.3, 0.5, 1.0})
        for (double b : {0.5, 1.0, 2.0}) {
            const Density W = equilibrium(a, b);
            for (double k : sample_k) CHECK(std::abs(evaluate_C(W, k, tol)) <= 10 * tol);
        }
    CHECK_THROWS_AS(equilibrium(-1.0, 1.0), validation_error);
    CHECK_THROWS_AS(equilibrium(1.0, 0.0), validation_error);
}

TEST_CASE("perturbed equilibrium is not annihilated") {
    const Density W0 = equilibrium(0.5, 1.0);
    const Density W = [W0](double k) { return W0(k) * (1.0 + 0.1 * std::sin(2 * pi * k)); };
    double mx = 0.0;
    for (double k : sample_k) mx = std::max(mx, std::abs(evaluate_C(W, k, tol)));
    CHECK(mx > 100 * tol);
}

TEST_CASE("nontrivial root structure of the energy mismatch") {
    // For k2 != k, G(k1) = omega + omega1 - omega2 - omega(k + k1 - k2) has the
    // trivial root k1 = k2 and exactly one more on the torus.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const int samples = 20000;
    for (int s = 0; s < 60; ++s) {
        const double k = u(rng), k2 = u(rng);
        if (std::abs(k - k2) < 1e-3 || std::abs(k) < 1e-3) continue;
        auto G = [&](double x) { return omega(k) + omega(x) - omega(k2) - omega(k + x - k2); };
        int changes = 0;
        double prev = G(-0.5 + 0.5 / samples / 3.1);
        for (int i = 1; i <= samples; ++i) {
            const double x = -0.5 + (i + 0.5 / 3.1) / samples;
            const double g = G(x);
            if ((g < 0) != (prev < 0)) ++changes;
            prev = g;
        }
        CHECK(changes == 2);
        const auto h = resonance_partner(k, k2);
        REQUIRE(h.has_value());
        CHECK(std::abs(symmetric(*h - k2)) > 1e-6);
    }
}

TEST_CASE("conserved moments") {
    const Density W = [](double k) { return 1.0 + 0.5 * std::cos(2 * pi * k); };
    const ConservationMoments m = conservation_check(W, WaveGrid(400), tol);
    CHECK(std::abs(m.mass) <= 1e-3 * m.l1);
    CHECK(std::abs(m.energy) <= 1e-3 * m.l1);

    std::mt19937_64 rng(22);
    const Density R = random_density(rng);
    const ConservationMoments a = conservation_check(R, WaveGrid(200), tol);
    const ConservationMoments b = conservation_check(R, WaveGrid(400), tol);
    CHECK(std::log2(std::abs(a.mass) / std::abs(b.mass)) >= 1.0);
    CHECK(std::log2(std::abs(a.energy) / std::abs(b.energy)) >= 1.0);

    const ConservationMoments e = conservation_check(equilibrium(0.5, 1.0), WaveGrid(64), tol);
    CHECK(e.l1 <= 10 * tol);
}

TEST_CASE("entropy production is nonnegative") {
    std::mt19937_64 rng(23);
    for (int s = 0; s < 20; ++s) {
        const Density W = random_density(rng);
        check_positive(W, WaveGrid(64));
        CHECK(entropy_production(W, tol) >= -1e-10);
    }
    CHECK(std::abs(entropy_production(equilibrium(0.5, 1.0), tol)) <= 10 * tol);
    const Density two_bump = [](double k) {
        return 0.05 + std::exp(-std::pow((k - 0.25) / 0.05, 2)) + std::exp(-std::pow((k + 0.3) / 0.04, 2));
    };
    CHECK(entropy_production(two_bump, tol) > 100 * tol);
    CHECK_THROWS_AS(check_positive([](double k) { return std::sin(2 * pi * k); }, WaveGrid(16)), validation_error);
}

TEST_CASE("normalization constant between the reduced and kernel forms") {
    const double c = calibrate_normalization(0.25);
    for (double k : {0.1, 0.4, -0.33}) CHECK(calibrate_normalization(k) == doctest::Approx(c).epsilon(1e-9));
    CHECK(c == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-9));

    // Reduced linearization against c times the kernel form, pointwise.
    auto f = [](double k) { return std::cos(2 * pi * k) + 0.2 * std::sin(4 * pi * k); };
    for (double k : {-0.41, -0.12, 0.17, 0.36}) {
        const double lk = apply_L_pointwise(k, f, 1e-11);
        CHECK(linearized_reduced(f, k, 1e-11) == doctest::Approx(c * lk).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("linearization consistency is first order") {
    const double c = calibrate_normalization();
    const auto s = linearization_consistency([](double k) { return std::cos(2 * pi * k); }, {1e-1, 1e-2, 1e-3},
                                             {-0.37, -0.12, 0.21, 0.41}, c);
    CHECK(s.order >= 0.8);
    for (std::size_t i = 1; i < s.errors.size(); ++i) CHECK(s.errors[i - 1] / s.errors[i] >= 6.0);

    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = u(rng), b = u(rng), d = u(rng);
    const auto r = linearization_consistency(
        [=](double k) { return a * std::cos(2 * pi * k) + b * std::sin(2 * pi * k) + d * std::cos(6 * pi * k); },
        {1e-1, 1e-2, 1e-3}, {-0.3, 0.05, 0.27}, c);
    CHECK(r.order >= 0.8);

    const auto one = linearization_consistency([](double) { return 1.0; }, {1e-1, 1e-2}, {0.2}, c);
    for (double e : one.errors) CHECK(e <= 1e-8);
}

TEST_CASE("quadratic form") {
    const double c = calibrate_normalization();
    const auto one = [](double) { return 1.0; };
    const auto zero = [](double) { return 0.0; };
    const auto cs = [](double k) { return std::cos(2 * pi * k); };
    const auto sn = [](double k) { return std::sin(2 * pi * k) + 0.5; };
    for (double k : {-0.3, 0.1, 0.45}) {
        CHECK(std::abs(quadratic_Q(one, one, k, c, tol)) <= 10 * tol);
        CHECK(quadratic_Q(zero, cs, k, c, tol) == 0.0);
        const double q1 = quadratic_Q(cs, cs, k, c, tol);
        CHECK(std::abs(q1) > 1e-6);
        CHECK(quadratic_Q(cs, cs, k, c, tol) == q1);
        CHECK(quadratic_Q(cs, sn, k, c, tol) == doctest::Approx(quadratic_Q(sn, cs, k, c, tol)).epsilon(1e-10));
    }
}
