#include <doctest.h>

#include <cmath>
#include <vector>

#include "qkin/correlator.hpp"
#include "qkin/errors.hpp"
#include "qkin/physical_params.hpp"
#include "qkin/potential.hpp"
#include "qkin/rng.hpp"
#include "support/oracles.hpp"

using namespace qkin;

TEST_CASE("physical params reject non-positive fields") {
    CHECK_NOTHROW(PhysicalParams(1, 1, 1, 1, 1));
    CHECK_THROWS_AS(PhysicalParams(0, 1, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(PhysicalParams(1, -1, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(PhysicalParams(1, 1, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(PhysicalParams(1, 1, 1, -2, 1), std::invalid_argument);
    CHECK_THROWS_AS(PhysicalParams(1, 1, 1, 1, 0), std::invalid_argument);
    // Gamma = 0 is the decoupled limit used by the unitary acceptance runs.
    CHECK_NOTHROW(PhysicalParams(1, 1, 1, 0, 1));
}

TEST_CASE("beta times T is exactly one") {
    const std::vector<double> temps = {0.1, 0.7, 1.0, 3.14159, 250.0};
    for (double t : temps) {
        PhysicalParams p(1, 1, t, 1, 1);
        CHECK(p.beta() * p.temperature == 1.0);
    }
}

TEST_CASE("correlator evaluation examples") {
    CHECK(Correlator::gaussian().eval(0.0) == 1.0);
    CHECK(Correlator::gaussian().eval(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(Correlator::levy(1.0).eval(-0.25) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(Correlator::quadratic_truncated().eval(0.5) == doctest::Approx(0.875));
}

TEST_CASE("correlator derivative examples") {
    CHECK(Correlator::gaussian().deriv(0.0) == 0.0);
    CHECK(Correlator::quadratic_truncated().deriv(0.5) == doctest::Approx(-0.5));
    // Finite-difference oracle, step 1e-6, agreement 1e-8.
    const double fd = oracles::finite_difference_deriv(
        [](double x) { return Correlator::gaussian().eval(x); }, 1.0, 1e-6);
    CHECK(Correlator::gaussian().deriv(1.0) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-10));
    CHECK(Correlator::gaussian().deriv(1.0) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("correlator invariants hold on sampled grids") {
    const auto tab_x = [] {
        std::vector<double> x;
        for (int i = 0; i <= 40; ++i) x.push_back(i * 0.25);
        return x;
    }();
    const auto tab_g = [&] {
        std::vector<double> g;
        for (double x : tab_x) g.push_back(1.0 / (1.0 + x * x));  // even bell shape
        return g;
    }();

    std::vector<Correlator> family = {
        Correlator::gaussian(),          Correlator::quadratic_truncated(),
        Correlator::levy(0.7),           Correlator::levy(1.5),
        Correlator::levy(2.0),           Correlator::levy_exponential(1.0),
        Correlator::levy_exponential(1.5),
        Correlator::tabulated(tab_x, tab_g)};

    for (const auto& g : family) {
        CAPTURE(g.name());
        CHECK(g.eval(0.0) == 1.0);
        double max_asym = 0.0, max_abs = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double x = -5.0 + 0.05 * i;
            max_asym = std::max(max_asym, std::abs(g.eval(x) - g.eval(-x)));
            max_abs = std::max(max_abs, std::abs(g.eval(x)));
        }
        CHECK(max_asym == 0.0);
        CHECK(max_abs <= 1.0 + 1e-12);
    }
}

TEST_CASE("correlator derivative agrees with centered differences") {
    std::vector<Correlator> family = {Correlator::gaussian(), Correlator::levy(1.5),
                                      Correlator::levy_exponential(1.3)};
    const CounterRng rng(77);
    for (const auto& g : family) {
        CAPTURE(g.name());
        for (int i = 0; i < 50; ++i) {
            double x = 3.0 * (rng.uniform(i, 0) - 0.5);
            if (std::abs(x) < 1e-3) x = 0.5;
            // Keep clear of the levy clamp kink.
            if (g.family() == CorrelatorFamily::Levy &&
                std::abs(std::abs(x) - std::pow(2.0, 1.0 / g.alpha())) < 0.05)
                continue;
            const double fd = oracles::finite_difference_deriv(
                [&](double u) { return g.eval(u); }, x, 1e-5);
            CHECK(g.deriv(x) ==
                  doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(fd))));
        }
    }
}

TEST_CASE("levy alpha=2 reduces to a pure quadratic near the origin") {
    const auto g = Correlator::levy(2.0);
    for (double x : {1e-3, 1e-2, 0.1}) {
        CHECK((g.eval(x) - 1.0) / (x * x) == doctest::Approx(-1.0).epsilon(1e-9));
    }
    // The exponential completion at alpha=2 carries the same leading order.
    const auto ge = Correlator::levy_exponential(2.0);
    CHECK((ge.eval(1e-4) - 1.0) / 1e-8 == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("levy singular derivative at origin") {
    CHECK_THROWS_AS(Correlator::levy(1.0).deriv(0.0), singular_derivative_error);
    CHECK_THROWS_AS(Correlator::levy(0.5).deriv(0.0), singular_derivative_error);
    CHECK_THROWS_AS(Correlator::levy_exponential(0.9).deriv(0.0), singular_derivative_error);
    CHECK(Correlator::levy(1.5).deriv(0.0) == 0.0);
}

TEST_CASE("tabulated correlator out-of-domain and mirroring") {
    std::vector<double> x, g;
    for (int i = 0; i <= 100; ++i) {
        x.push_back(i * 0.1);
        g.push_back(std::exp(-0.5 * x.back() * x.back()));
    }
    const auto tab = Correlator::tabulated(x, g);
    CHECK(tab.eval(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-5));
    CHECK(tab.eval(-2.0) == tab.eval(2.0));
    CHECK_THROWS_AS(tab.eval(10.5), std::out_of_range);
    CHECK(tab.deriv(1.0) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-3));
}

TEST_CASE("potential evaluation examples") {
    CHECK(Potential::free().eval(3.7) == 0.0);
    CHECK(Potential::harmonic(2.0).eval(1.0) == doctest::Approx(1.0));
    CHECK(Potential::double_well(1.0, 1.0).eval(0.0) == doctest::Approx(0.25));
    CHECK(Potential::double_well(1.0, 1.0).eval(1.0) == doctest::Approx(0.0));
    CHECK(Potential::double_well(1.0, 1.0).eval(-1.0) == doctest::Approx(0.0));
    CHECK(Potential::linear(2.0).eval(1.5) == doctest::Approx(3.0));
    CHECK(Potential::parabolic_barrier(2.0).eval(1.0) == doctest::Approx(-1.0));
}

TEST_CASE("potential derivatives match finite differences") {
    const std::vector<Potential> pots = {Potential::linear(0.7), Potential::harmonic(1.3),
                                         Potential::parabolic_barrier(0.9),
                                         Potential::double_well(1.2, 0.8)};
    for (const auto& u : pots) {
        CAPTURE(u.name());
        for (double q : {-1.7, -0.4, 0.0, 0.3, 1.9}) {
            const double fd = oracles::finite_difference_deriv(
                [&](double x) { return u.eval(x); }, q, 1e-6);
            CHECK(u.deriv(q) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("tabulated potential out-of-domain error") {
    const auto u = Potential::tabulated({-1.0, 0.0, 1.0, 2.0}, {1.0, 0.0, 1.0, 4.0});
    CHECK_NOTHROW(u.eval(0.5));
    CHECK_THROWS_AS(u.eval(5.0), std::out_of_range);
}
