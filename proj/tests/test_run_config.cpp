#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "phonon/acceptance.hpp"
#include "phonon/errors.hpp"
#include "phonon/run_config.hpp"

using namespace phonon;

TEST_CASE("keys are validated at parse time") {
    RunConfig c;
    CHECK_NOTHROW(c.set("eps", "0.1, 0.01"));
    CHECK_NOTHROW(c.set("xi", "0,1"));
    CHECK_NOTHROW(c.set("scheme", "implicit_euler"));
    CHECK_THROWS_AS(c.set("epsilon", "0.1"), validation_error);
    CHECK_THROWS_AS(c.set("eps", "-0.1"), validation_error);
    CHECK_THROWS_AS(c.set("eps", "abc"), validation_error);
    CHECK_THROWS_AS(c.set("quad_tol", "inf"), validation_error);
    CHECK_THROWS_AS(c.set("quad_tol", "nan"), validation_error);
    CHECK_THROWS_AS(c.set("n", "12.5"), validation_error);
    CHECK_THROWS_AS(c.set("scheme", "rk4"), validation_error);
    CHECK(c.list("eps", {}) == std::vector<double>{0.1, 0.01});
    CHECK(c.list("p", {1.0}) == std::vector<double>{1.0});
    CHECK(c.sim_config().scheme == Scheme::implicit_euler);
}

TEST_CASE("config file with comments and overrides") {
    const auto path = std::filesystem::temp_directory_path() / "phonon_cfg_test.txt";
    {
        std::ofstream out(path);
        out << "# experiment\n\nn = 128\nsigma=3 # wider\nsteps = 400\n";
    }
    RunConfig c;
    c.load_file(path.string());
    c.set("steps", "800");
    const SimConfig s = c.sim_config();
    CHECK(s.n == 128);
    CHECK(s.sigma == 3.0);
    CHECK(s.steps == 800);
    {
        std::ofstream out(path);
        out << "bogus = 1\n";
    }
    RunConfig d;
    CHECK_THROWS_AS(d.load_file(path.string()), validation_error);
    {
        std::ofstream out(path);
        out << "n 128\n";
    }
    CHECK_THROWS_AS(d.load_file(path.string()), validation_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(d.load_file(path.string()), io_error);
}

TEST_CASE("number formatting") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    for (double x : {0.1, 1.0 / 3.0, -2.5e-20, 6.02214076e23, 1.4170044}) CHECK(std::strtod(format_real(x).c_str(), nullptr) == x);
}

TEST_CASE("criterion selection") {
    CHECK(parse_selection("") == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    CHECK(parse_selection("kappa") == std::set<int>{1, 2});
    CHECK(parse_selection("simulation,10") == std::set<int>{7, 8, 9, 10});
    CHECK_THROWS_AS(parse_selection("11"), validation_error);
    CHECK_THROWS_AS(parse_selection("everything"), validation_error);
}
