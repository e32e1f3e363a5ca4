#include <doctest.h>

#include <cmath>

#include "qkin/classical.hpp"
#include "qkin/detail/parallel.hpp"
#include "qkin/rng.hpp"
#include "support/oracles.hpp"

using namespace qkin;

TEST_CASE("classical coefficient examples") {
    PhysicalParams p(1.0, 1.0, 1.0, 1.0, 1.0);
    const auto c = classical_coefficients(p);
    CHECK(c.gamma == doctest::Approx(0.5));
    CHECK(c.d_qq == doctest::Approx(2.0));
    CHECK(c.d_pp == doctest::Approx(0.5));  // M gamma T
}

TEST_CASE("einstein identity holds over randomized parameters") {
    const CounterRng rng(24601);
    for (int i = 0; i < 1000; ++i) {
        const auto [u1, u2] = rng.uniform_pair(i, 0);
        const auto [u3, u4] = rng.uniform_pair(i, 1);
        const auto [u5, _] = rng.uniform_pair(i, 2);
        PhysicalParams p(0.1 + 5.0 * u1, 0.1 + 3.0 * u2, 0.1 + 4.0 * u3, 0.1 + 6.0 * u4,
                         0.1 + 2.0 * u5);
        const auto c = classical_coefficients(p);
        CHECK(std::abs(p.mass * p.beta() * c.gamma * c.d_qq - 1.0) < 1e-12);
    }
}

TEST_CASE("doubling X0 quarters gamma and quadruples D_QQ") {
    PhysicalParams p1(1.7, 0.9, 2.2, 1.3, 1.0);
    PhysicalParams p2(1.7, 0.9, 2.2, 1.3, 2.0);
    const auto c1 = classical_coefficients(p1);
    const auto c2 = classical_coefficients(p2);
    CHECK(c2.gamma == doctest::Approx(0.25 * c1.gamma).epsilon(1e-15));
    CHECK(c2.d_qq == doctest::Approx(4.0 * c1.d_qq).epsilon(1e-15));
}

TEST_CASE("ballistic motion is exact when gamma = 0") {
    PhysicalParams p(2.0, 1.0, 1.0, 1.0, 1.0);
    const ClassicalCoefficients c{0.0, 0.0, 0.0};
    auto ens = langevin_init(64, 9, 0.0, 1.0, 0.0, 1.0);
    const auto q0 = ens.q;
    const auto p0 = ens.p;
    const double dt = 0.01;
    const int steps = 500;
    for (int i = 0; i < steps; ++i) langevin_step(ens, c, Potential::free(), p, dt);
    for (int w = 0; w < ens.n_walkers(); ++w) {
        CHECK(ens.p[w] == p0[w]);
        CHECK(ens.q[w] ==
              doctest::Approx(q0[w] + p0[w] * steps * dt / p.mass).epsilon(1e-12));
    }
}

TEST_CASE("stability guard rejects coarse steps") {
    PhysicalParams p(1.0, 1.0, 1.0, 4.0, 1.0);
    const auto c = classical_coefficients(p);  // gamma = 2
    auto ens = langevin_init(8, 1, 0.0, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS(langevin_step(ens, c, Potential::free(), p, 0.1), std::invalid_argument);
    CHECK_NOTHROW(langevin_step(ens, c, Potential::free(), p, 0.01));
}

TEST_CASE("momentum relaxes to the thermal variance M T") {
    // Stationary Ornstein-Uhlenbeck: Var P -> d_pp / gamma = M T.
    PhysicalParams p(1.0, 1.0, 2.0, 2.0, 1.0);
    const auto c = classical_coefficients(p);  // gamma = 1/2, MT = 2
    const int n = 30000;
    auto ens = langevin_init(n, 31337, 0.0, 0.5, 0.0, 0.2);
    const double dt = 0.01;
    for (int i = 0; i < 800; ++i) langevin_step(ens, c, Potential::free(), p, dt);
    const auto m = ensemble_moments(ens);
    CHECK(m.p_var == doctest::Approx(p.mass * p.temperature).epsilon(0.02));

    // Intermediate-time variances match the moment-ODE oracle.
    auto ens2 = langevin_init(n, 555, 0.0, 0.5, 0.0, 0.2);
    for (int i = 0; i < 100; ++i) langevin_step(ens2, c, Potential::free(), p, dt);
    const auto m2 = ensemble_moments(ens2);
    const auto ref = oracles::ou_moments(1.0, 0.25, 0.04, 0.0, c.gamma, p.mass,
                                         p.temperature);
    CHECK(m2.p_var == doctest::Approx(ref.var_p).epsilon(0.03));
    CHECK(m2.q_var == doctest::Approx(ref.var_q).epsilon(0.03));
}

TEST_CASE("momentum autocorrelation time is 1/gamma") {
    PhysicalParams p(1.0, 1.0, 1.5, 2.0, 1.0);
    const auto c = classical_coefficients(p);  // gamma = beta*Gamma/2 = 2/3
    const int n = 100000;
    const double dt = 0.01;
    auto ens = langevin_init(n, 777, 0.0, 1.0, 0.0, std::sqrt(p.mass * p.temperature));
    // Equilibrate, snapshot, then correlate against later times.
    for (int i = 0; i < 300; ++i) langevin_step(ens, c, Potential::free(), p, dt);
    const auto p_ref = ens.p;
    std::vector<double> taus, logs;
    for (int block = 1; block <= 4; ++block) {
        for (int i = 0; i < 50; ++i) langevin_step(ens, c, Potential::free(), p, dt);
        double cov = 0.0, var = 0.0, mean_ref = 0.0, mean_now = 0.0;
        for (int w = 0; w < n; ++w) {
            mean_ref += p_ref[w];
            mean_now += ens.p[w];
        }
        mean_ref /= n;
        mean_now /= n;
        for (int w = 0; w < n; ++w) {
            cov += (p_ref[w] - mean_ref) * (ens.p[w] - mean_now);
            var += (p_ref[w] - mean_ref) * (p_ref[w] - mean_ref);
        }
        taus.push_back(block * 50 * dt);
        logs.push_back(std::log(cov / var));
    }
    // ln C(tau) = -gamma tau: least squares through the four lags.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        sx += taus[i];
        sy += logs[i];
        sxx += taus[i] * taus[i];
        sxy += taus[i] * logs[i];
    }
    const double nn = taus.size();
    const double gamma_hat = -(nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    CHECK(gamma_hat == doctest::Approx(c.gamma).epsilon(0.05));
}

TEST_CASE("counter rng makes runs identical under any partitioning") {
    PhysicalParams p(1.0, 1.0, 1.0, 1.0, 1.0);
    const auto c = classical_coefficients(p);
    auto run = [&](int threads) {
        set_worker_threads(threads);
        auto ens = langevin_init(4096, 42, 0.0, 1.0, 0.1, 1.0);
        for (int i = 0; i < 50; ++i) langevin_step(ens, c, Potential::free(), p, 0.01);
        set_worker_threads(1);
        return ens;
    };
    const auto a = run(1);
    const auto b = run(4);
    for (int w = 0; w < a.n_walkers(); ++w) {
        CHECK(a.q[w] == b.q[w]);
        CHECK(a.p[w] == b.p[w]);
    }
}

TEST_CASE("philox stream has sane uniform statistics") {
    const CounterRng rng(987654321);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(i, 0xabc);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}
