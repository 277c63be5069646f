#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "phonon/errors.hpp"
#include "phonon/kernel.hpp"
#include "phonon/symbols.hpp"

using namespace phonon;

namespace {

const VModel& model() {
    static const VModel m;
    return m;
}

const double mellin_closed = (pi / 2.0) / std::sin(pi / 5.0);

}  // namespace

TEST_CASE("Mellin integrals") {
    boost::math::quadrature::exp_sinh<double> es;
    for (double a : {0.6, -0.6, 0.0, 0.3}) {
        const double oracle = es.integrate([a](double z) { return std::pow(z, a) / (1.0 + z * z); }, 1e-14);
        CHECK(mellin_integral(a) == doctest::Approx(oracle).epsilon(1e-10));
    }
    CHECK(std::abs(mellin_integral(0.6) - mellin_closed) <= 1e-8);
    CHECK(std::abs(mellin_integral(-0.6) - mellin_closed) <= 1e-8);
    CHECK(std::abs(mellin_integral(0.0) - pi / 2.0) <= 1e-12);
    CHECK_THROWS_AS(mellin_integral(1.0), validation_error);
}

TEST_CASE("kappa constants") {
    for (double v0 : {0.3, 1.0, 1.417, 5.0}) {
        const KappaSet k = compute_kappas(v0);
        CHECK(std::abs(k.kappa2 - 3.0 * pi / 5.0) <= 1e-10);
        CHECK(k.kappa1 > 0.0);
        CHECK(k.kappa3 > 0.0);
        CHECK(k.kappa2 * k.kappa2 < k.kappa1 * k.kappa3);
        CHECK(std::abs(k.kappa1 * k.kappa3 - 36.0 / 25.0 * mellin_closed * mellin_closed) <= 1e-8);
        CHECK(k.kappa_eff == doctest::Approx(k.kappa1 - k.kappa2 * k.kappa2 / k.kappa3));
        CHECK(k.kappa_eff > 0.0);
    }
    CHECK_THROWS_AS(compute_kappas(0.0), validation_error);
}

TEST_CASE("limit symbols") {
    const KappaSet k = compute_kappas(1.4);
    const auto z = limit_symbols(k, 2.0, 0.0);
    CHECK(z[0] == -2.0);
    CHECK(z[1] == 0.0);
    CHECK(z[2] == 0.0);
    const auto u = limit_symbols(k, 0.0, 1.0);
    CHECK(u[0] == doctest::Approx(-k.kappa1));
    CHECK(u[1] == doctest::Approx(-k.kappa2));
    CHECK(u[2] == doctest::Approx(-k.kappa3));
    CHECK(limit_symbols(k, 1.0, 3.0)[1] == doctest::Approx(3.0 * limit_symbols(k, 1.0, 1.0)[1]));
}

TEST_CASE("smooth collision frequency model") {
    const VModel& m = model();
    CHECK(m.fit_error() < 1e-8);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-6.0, std::log10(0.5));
    for (int i = 0; i < 20; ++i) {
        const double k = std::pow(10.0, u(rng));
        CHECK(m.V(k) == doctest::Approx(v_of_k(k, 1e-12)).epsilon(1e-7));
        CHECK(m.V(-k) == m.V(k));
    }
    const double k = 1e-9;
    CHECK(m.Wt(k) == doctest::Approx(m.v0()).epsilon(1e-4));
    CHECK(m.v0() == doctest::Approx(assemble_kernel(WaveGrid(400)).v0).epsilon(1e-3));
}

TEST_CASE("symbol structure") {
    const VModel& m = model();
    for (double eps : {0.1, 0.01}) {
        for (double p : {0.01, 1.0, 3.0})
            for (double xi : {0.0, 0.2, 1.0, 2.0}) {
                const Symbols s = symbols_eps(m, eps, p, xi);
                CHECK(s.a1.real() <= 0.0);
                if (p > 0.0 || xi != 0.0) CHECK(s.a3.real() < 0.0);
                CHECK(std::abs(s.a1.imag()) <= 1e-10 * std::abs(s.a1));
                CHECK(std::abs(s.a2.imag()) <= 1e-10 * std::abs(s.a2) + 1e-300);
                CHECK(std::abs(s.a3.imag()) <= 1e-10 * std::abs(s.a3));
                const Symbols t = symbols_eps(m, eps, p, -xi);
                CHECK(std::abs(t.a1 - s.a1) <= 1e-9 * std::abs(s.a1));
                CHECK(std::abs(t.a2 - s.a2) <= 1e-9 * std::abs(s.a2) + 1e-12);
                CHECK(std::abs(t.a3 - s.a3) <= 1e-9 * std::abs(s.a3));
            }
    }
}

TEST_CASE("symbols against direct quadrature of the closed-form V") {
    // Independent: 40-point Gauss-Legendre on dyadic pieces of (0, 1/2], with
    // v_of_k in place of the model and the k, -k pair summed explicitly. Below
    // 2^-32 double quadrature of V loses relative accuracy, so V is continued
    // by its own ratio to |sin pi k|^{5/3} at that scale.
    const double eps = 0.1, p = 1.0, xi = 1.0;
    using GL = boost::math::quadrature::gauss<double, 40>;
    auto sin53 = [](double k) { return std::pow(std::sin(pi * k), 5.0 / 3.0); };
    const double k_floor = std::ldexp(1.0, -32);
    const double ratio = v_of_k(k_floor, 1e-7 * sin53(k_floor)) / sin53(k_floor);
    auto V_of = [&](double k) { return k < k_floor ? ratio * sin53(k) : v_of_k(k, 1e-7 * sin53(k)); };
    std::array<double, 3> direct{};
    for (int j = 1; j <= 60; ++j) {
        const double lo = std::ldexp(1.0, -j - 1), hi = std::ldexp(1.0, -j);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        auto add = [&](double x, double wgt) {
            const double k = mid + half * x;
            const double V = V_of(k), wp = pi * std::cos(pi * k), om = omega(k);
            const std::complex<double> D(std::pow(eps, 1.6) * p + V, eps * wp * xi);
            const double g = ((V / D - 1.0) + (V / std::conj(D) - 1.0)).real() * half * wgt;
            direct[0] += g * V;
            direct[1] += g * V / om;
            direct[2] += g * V / (om * om);
        };
        const auto& x = GL::abscissa();
        const auto& w = GL::weights();
        for (std::size_t i = 0; i < x.size(); ++i) {
            add(x[i], w[i]);
            if (x[i] != 0.0) add(-x[i], w[i]);
        }
    }
    const Symbols s = symbols_eps(model(), eps, p, xi);
    CHECK(s.a1.real() == doctest::Approx(std::pow(eps, -1.6) * direct[0]).epsilon(1e-6));
    CHECK(s.a2.real() == doctest::Approx(std::pow(eps, -1.0) * direct[1]).epsilon(1e-6));
    CHECK(s.a3.real() == doctest::Approx(std::pow(eps, -0.4) * direct[2]).epsilon(1e-6));
}

TEST_CASE("symbols approach their limits") {
    const KappaSet k = compute_kappas(model().v0());
    const ConvergenceStudy cs = convergence_study(model(), k, 1.0, 1.0, {1e-1, 1e-2, 1e-3});
    for (int i = 0; i < 3; ++i) {
        CHECK(cs.fits[i].errors[1] < cs.fits[i].errors[0]);
        CHECK(cs.fits[i].errors[2] < cs.fits[i].errors[1]);
    }
    CHECK(cs.fits[0].slope >= 0.3);
    CHECK(std::abs(a1_eps(model(), 1e-3, 1.0, 0.0) + 1.0) <= 0.05);

    // At xi = 0 the a2, a3 limits vanish; the errors decrease.
    std::vector<double> e2, e3;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        e2.push_back(std::abs(a2_eps(model(), eps, 1.0, 0.0)));
        e3.push_back(std::abs(a3_eps(model(), eps, 1.0, 0.0)));
    }
    CHECK(e2[2] < e2[0]);
    CHECK(e3[2] < e3[1]);
    CHECK(e3[1] < e3[0]);
}

TEST_CASE("a3 lower bound") {
    std::vector<double> margins;
    for (double eps : {0.2, 0.1, 0.05}) {
        const LowerBoundScan s = a3_lower_bound_check(model(), eps, 2.0);
        CHECK(s.margin > 0.0);
        CHECK(s.max_re_a3 < 0.0);
        margins.push_back(s.margin);
        // p -> 0 at xi = 1 stays above the measured margin
        CHECK(std::abs(a3_eps(model(), eps, 1e-6, 1.0)) >= s.margin);
    }
    const auto [mn, mx] = std::minmax_element(margins.begin(), margins.end());
    CHECK((*mx - *mn) / *mn <= 0.5);
}

TEST_CASE("initial-data functionals") {
    const KFunction one = [](double) { return std::complex<double>(1.0, 0.0); };
    const KFunction zero = [](double) { return std::complex<double>(0.0, 0.0); };
    std::vector<double> d1;
    for (double eps : {0.1, 0.01, 0.001}) {
        d1.push_back(std::abs(F1_eps(model(), one, eps, 1.0, 1.0) - 1.0));
        const double f2 = std::abs(F2_eps(model(), one, eps, 1.0, 1.0));
        const double bound = std::pow(eps, 0.6) * (1.0 + std::abs(std::log(std::pow(eps, 1.6))));
        CHECK(f2 <= 2.0 * bound);
    }
    CHECK(d1[1] < d1[0]);
    CHECK(d1[2] < d1[1]);
    CHECK(std::abs(F1_eps(model(), zero, 0.1, 1.0, 1.0)) == 0.0);
    CHECK(std::abs(F2_eps(model(), zero, 0.1, 1.0, 1.0)) == 0.0);
}

TEST_CASE("rate fit") {
    const RateFit f = fit_rate({1e-1, 1e-2, 1e-3}, {2e-1, 2e-2, 2e-3});
    CHECK(f.slope == doctest::Approx(1.0));
    CHECK(f.residual < 1e-12);
}
