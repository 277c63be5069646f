#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "phonon/errors.hpp"
#include "phonon/frac_diffusion.hpp"
#include "phonon/grid.hpp"

using namespace phonon;

namespace {

ComplexVector random_symmetric(int M, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexVector c(M);
    c[0] = g(rng);
    c[M / 2] = g(rng);
    for (int m = 1; m < M / 2; ++m) {
        c[m] = {g(rng), g(rng)};
        c[M - m] = std::conj(c[m]);
    }
    return c;
}

double l2(const ComplexVector& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

const KappaSet kappas = compute_kappas(1.4170044);

}  // namespace

TEST_CASE("mode bookkeeping") {
    CHECK(signed_mode(0, 8) == 0);
    CHECK(signed_mode(4, 8) == 4);
    CHECK(signed_mode(5, 8) == -3);
    const auto xi = mode_wavenumbers(8, 16.0);
    CHECK(xi[1] == doctest::Approx(2 * pi / 16.0));
    CHECK(xi[7] == doctest::Approx(-2 * pi / 16.0));
    CHECK_THROWS_AS(mode_wavenumbers(8, 0.0), validation_error);
}

TEST_CASE("diffusion parameters") {
    const DiffusionParams p = DiffusionParams::from_kappas(kappas, 1.0);
    CHECK(p.kappa_eff == doctest::Approx(kappas.kappa1 - kappas.kappa2 * kappas.kappa2 / kappas.kappa3));
    KappaSet bad = kappas;
    bad.kappa2 = 10.0;
    CHECK_THROWS_AS(DiffusionParams::from_kappas(bad), validation_error);
    CHECK_THROWS_AS(DiffusionParams::from_kappas(kappas, 0.0), validation_error);
}

TEST_CASE("exact evolution: identity, semigroup, decay, mean") {
    std::mt19937_64 rng(41);
    const int M = 32;
    const auto xi = mode_wavenumbers(M, 20.0);
    const auto T0 = random_symmetric(M, rng);
    const DiffusionParams p = DiffusionParams::from_kappas(kappas);

    const auto same = evolve_hat(p, T0, xi, 0.0);
    for (int m = 0; m < M; ++m) CHECK(same[m] == T0[m]);

    const auto a = evolve_hat(p, evolve_hat(p, T0, xi, 0.3), xi, 0.45);
    const auto b = evolve_hat(p, T0, xi, 0.75);
    for (int m = 0; m < M; ++m) CHECK(std::abs(a[m] - b[m]) <= 1e-14 * std::max(1.0, std::abs(T0[m])));

    double prev = l2(T0);
    for (double t : {0.1, 0.5, 1.0, 4.0}) {
        const auto T = evolve_hat(p, T0, xi, t);
        CHECK(l2(T) < prev);
        prev = l2(T);
        CHECK(T[0] == T0[0]);
        const double rate = p.kappa_eff * std::pow(std::abs(xi[3]), 1.6);
        CHECK(std::abs(T[3] - std::exp(-rate * t) * T0[3]) <= 1e-15 * std::abs(T0[3]));
    }
    CHECK_THROWS_AS(evolve_hat(p, T0, xi, -1.0), validation_error);
}

TEST_CASE("temperature rescaling") {
    std::mt19937_64 rng(42);
    const int M = 16;
    const auto xi = mode_wavenumbers(M, 10.0);
    const auto T0 = random_symmetric(M, rng);
    const auto hot = evolve_hat(DiffusionParams::from_kappas(kappas, 2.0), T0, xi, 0.8);
    const auto cold = evolve_hat(DiffusionParams::from_kappas(kappas, 1.0), T0, xi, 0.8 / std::pow(2.0, 1.2));
    for (int m = 0; m < M; ++m) CHECK(std::abs(hot[m] - cold[m]) <= 1e-14 * std::max(1.0, std::abs(T0[m])));
}

TEST_CASE("slaved amplitude") {
    const int M = 16;
    const auto xi = mode_wavenumbers(M, 10.0);
    ComplexVector T(M, {1.0, -0.5});
    const auto S = slaved_S_hat(kappas, T, xi, -1);
    CHECK(S[0] == std::complex<double>(0.0, 0.0));
    for (int m = 1; m < M; ++m) {
        CHECK(std::abs(S[m]) / std::abs(T[m]) ==
              doctest::Approx(kappas.kappa2 / kappas.kappa3 * std::pow(std::abs(xi[m]), 0.6)));
        // inserting S into -kappa1 |xi|^{8/5} T - kappa2 |xi| S gives -kappa |xi|^{8/5} T
        const double a = std::abs(xi[m]);
        const auto lhs = -kappas.kappa1 * std::pow(a, 1.6) * T[m] - kappas.kappa2 * a * S[m];
        const auto rhs = -kappas.kappa_eff * std::pow(a, 1.6) * T[m];
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
    CHECK_THROWS_AS(slaved_S_hat(kappas, T, xi, 0), validation_error);
}

TEST_CASE("transforms") {
    const int M = 16;
    std::vector<double> x(M);
    for (int m = 0; m < M; ++m) x[m] = std::cos(2 * pi * 3 * m / M);
    const auto c = forward_transform(x);
    CHECK(std::abs(c[3] - 0.5) < 1e-15);
    CHECK(std::abs(c[13] - 0.5) < 1e-15);
    const auto back = real_space_render(c);
    for (int m = 0; m < M; ++m) CHECK(back[m] == doctest::Approx(x[m]).epsilon(1e-14).scale(1.0));

    std::mt19937_64 rng(43);
    const auto r = random_symmetric(32, rng);
    const auto again = forward_transform(real_space_render(r));
    for (int m = 0; m < 32; ++m) CHECK(std::abs(again[m] - r[m]) <= 1e-12);

    const auto zero = real_space_render(ComplexVector(8));
    for (double v : zero) CHECK(v == 0.0);
    ComplexVector bad(8);
    bad[1] = {1.0, 1.0};
    CHECK_THROWS_AS(real_space_render(bad), validation_error);
}
