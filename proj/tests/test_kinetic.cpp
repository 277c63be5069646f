#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phonon/errors.hpp"
#include "phonon/kinetic.hpp"

using namespace phonon;

namespace {

const KernelTable& table() {
    static const KernelTable t = assemble_kernel(WaveGrid(64));
    return t;
}

SimConfig small_config() {
    SimConfig c;
    c.n = 64;
    c.M = 8;
    c.Lx = 16.0;
    c.eps = 0.2;
    c.t_end = 0.2;
    c.steps = 200;
    c.record_every = 50;
    return c;
}

}  // namespace

TEST_CASE("configuration validation") {
    SimConfig c = small_config();
    CHECK_NOTHROW(validate(c));
    c.M = 7;
    CHECK_THROWS_AS(validate(c), validation_error);
    c = small_config();
    c.eps = -1.0;
    CHECK_THROWS_AS(validate(c), validation_error);
    c = small_config();
    c.t_end = 10.0;
    c.steps = 1;
    const DiscreteOperator op(table());
    CHECK_THROWS_AS(KineticSolver(c, op), validation_error);
    c = small_config();
    c.n = 128;
    CHECK_THROWS_AS(KineticSolver(c, op), validation_error);
}

TEST_CASE("initial state") {
    const DiscreteOperator op(table());
    const KineticSolver s(small_config(), op);
    const auto zero = s.init([](double, double) { return 0.0; });
    CHECK(zero.fhat.norm() == 0.0);

    const auto st = s.init(gaussian_temperature(2.0, 16.0));
    for (int m = 0; m < 8; ++m) {
        const auto col = st.fhat.col(m);
        CHECK((col.array() - col(0)).abs().maxCoeff() <= 1e-15);
    }
    for (int m = 1; m < 4; ++m) CHECK((st.fhat.col(m) - st.fhat.col(8 - m).conjugate()).norm() == 0.0);

    const auto rows = s.extract_moments(st);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(std::abs(r.S) <= 1e-12);
        CHECK(r.h_norm <= 1e-10);
    }
}

TEST_CASE("norm, mean and conjugate symmetry under stepping") {
    const DiscreteOperator op(table());
    const KineticSolver s(small_config(), op);
    const InitialData f0 = [](double x, double k) {
        return std::exp(-std::pow(x - 8.0, 2) / 4.0) * (1.0 + 0.5 * std::cos(2 * pi * k) + 0.3 * std::sin(2 * pi * k));
    };
    const RunResult run = run_simulation(s, f0);
    CHECK(run.max_l2_increase <= 1e-12);
    CHECK(run.max_mean_drift <= 1e-10);

    // Negative modes evolved with their own propagator match the conjugates.
    auto st = s.init(f0);
    const Eigen::VectorXcd neg0 = st.fhat.col(8 - 1);
    const SimConfig& c = s.config();
    const double xi = -2 * pi / c.Lx;
    Eigen::MatrixXcd A = (op.matrix()).cast<std::complex<double>>();
    for (int i = 0; i < op.n(); ++i) A(i, i) -= std::complex<double>(0.0, c.eps * xi * omega_prime(op.table().grid.nodes[i]));
    A *= std::pow(c.eps, -c.alpha);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(op.n(), op.n());
    const Eigen::MatrixXcd P = (I - 0.5 * s.dt() * A).fullPivLu().solve(I + 0.5 * s.dt() * A);
    Eigen::VectorXcd neg = neg0;
    for (int k = 0; k < 50; ++k) {
        s.step(st);
        neg = P * neg;
    }
    CHECK((neg - st.fhat.col(7)).norm() <= 1e-11 * neg.norm());
    CHECK((st.fhat.col(1).conjugate() - st.fhat.col(7)).norm() == 0.0);
}

TEST_CASE("transport-only phase rotation") {
    // With Tbar tiny the collision term drops out and each node rotates by the
    // Crank-Nicolson factor (1 - i theta/2)/(1 + i theta/2), theta = dt eps^{1-alpha} omega' xi.
    SimConfig c = small_config();
    c.Tbar = 1e-9;
    c.steps = 100;
    const DiscreteOperator op(table());
    const KineticSolver s(c, op);
    auto st = s.init([](double x, double) { return std::cos(2 * pi * x / 16.0); });
    const Eigen::VectorXcd f0 = st.fhat.col(1);
    for (int k = 0; k < c.steps; ++k) s.step(st);
    const double xi = 2 * pi / c.Lx;
    double worst = 0.0;
    for (int i = 0; i < op.n(); ++i) {
        const double theta = s.dt() * std::pow(c.eps, 1.0 - c.alpha) * omega_prime(op.table().grid.nodes[i]) * xi;
        const std::complex<double> g = std::complex<double>(1.0, -0.5 * theta) / std::complex<double>(1.0, 0.5 * theta);
        worst = std::max(worst, std::abs(st.fhat(i, 1) - std::pow(g, c.steps) * f0(i)));
        // and close to the exact rotation at second order
        const std::complex<double> exact = std::exp(std::complex<double>(0.0, -theta * c.steps)) * f0(i);
        CHECK(std::abs(st.fhat(i, 1) - exact) <= std::pow(std::abs(theta), 3) * c.steps * std::abs(f0(i)) + 1e-12);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("kernel states at xi = 0 are stationary") {
    const DiscreteOperator op(table());
    const KineticSolver s(small_config(), op);
    auto st = s.init([](double, double k) { return 1.0 + 0.3 / omega(k); });
    const Eigen::VectorXcd f0 = st.fhat.col(0);
    for (int k = 0; k < 100; ++k) s.step(st);
    CHECK((st.fhat.col(0) - f0).norm() <= 1e-10 * f0.norm());
}

TEST_CASE("h stays bounded over time") {
    const DiscreteOperator op(table());
    SimConfig c = small_config();
    c.record_every = 10;
    const KineticSolver s(c, op);
    const RunResult run = run_simulation(s, gaussian_temperature(2.0, 16.0));
    double hmax = 0.0;
    for (const auto& r : run.trace) hmax = std::max(hmax, r.h_norm);
    CHECK(hmax < 10.0);
    for (std::size_t i = 4; i < run.trace.size(); i += 4) CHECK(run.trace[i].t > run.trace[i - 4].t);
}

TEST_CASE("implicit Euler is also norm nonincreasing") {
    SimConfig c = small_config();
    c.scheme = Scheme::implicit_euler;
    const DiscreteOperator op(table());
    const KineticSolver s(c, op);
    const RunResult run = run_simulation(s, gaussian_temperature(2.0, 16.0));
    CHECK(run.max_l2_increase <= 1e-12);
    CHECK(run.max_mean_drift <= 1e-10);
}

TEST_CASE("small sweep bookkeeping") {
    SimConfig c = small_config();
    const KappaSet k = compute_kappas(1.4170044);
    const SweepReport rep = run_epsilon_sweep(c, table(), k, {0.2, 0.1});
    REQUIRE(rep.results.size() == 2);
    CHECK((rep.sign == 1 || rep.sign == -1));
    for (const auto& r : rep.results) {
        CHECK(r.e_T >= 0.0);
        CHECK(r.stiffness <= c.max_stiffness);
    }
    CHECK_THROWS_AS(run_epsilon_sweep(c, table(), k, {0.1, 0.2}), validation_error);
}
