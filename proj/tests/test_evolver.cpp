#include <doctest.h>

#include <cmath>
#include <limits>

#include "qkin/analytic.hpp"
#include "qkin/errors.hpp"
#include "qkin/evolver.hpp"
#include "qkin/observables.hpp"
#include "support/oracles.hpp"

using namespace qkin;

TEST_CASE("generator forms agree between (X,Y) and (r,s) coordinates") {
    // Dual-evaluation check on random smooth test functions, several
    // potential/correlator combinations.
    PhysicalParams p(1.3, 0.7, 2.0, 0.9, 1.1);
    CHECK(verify_coordinate_transform(p, Correlator::gaussian(), Potential::harmonic(1.5)) <
          1e-8);
    CHECK(verify_coordinate_transform(p, Correlator::levy(1.5),
                                      Potential::double_well(1.0, 0.8)) < 1e-8);
    CHECK(verify_coordinate_transform(p, Correlator::levy_exponential(1.2),
                                      Potential::linear(0.4)) < 1e-8);
    CHECK(verify_coordinate_transform(p, Correlator::quadratic_truncated(),
                                      Potential::free()) < 1e-8);
}

TEST_CASE("generator trace vanishes at the s = 0 row") {
    PhysicalParams p(1.0, 1.0, 2.0, 1.5, 1.0);
    const auto rho =
        DensityMatrixGrid::gaussian_pure(64, 64, 20.0, 20.0, 0.4, 1.0, 0.3, 1.0);
    const auto l = apply_generator(rho, p, Correlator::gaussian(), Potential::harmonic(1.0));
    cdouble tr(0.0, 0.0);
    for (int ir = 0; ir < l.nr(); ++ir) tr += l.at(ir, l.s_zero_index());
    tr *= l.dr();
    CHECK(std::abs(tr) < 1e-10);
}

TEST_CASE("generator reduces to the kinetic term in the free unitary limit") {
    PhysicalParams p(1.0, 1.0, 1.0, 0.0, 1.0);  // Gamma = 0
    const auto rho = DensityMatrixGrid::gaussian_pure(64, 64, 20.0, 20.0, 0.0, 1.0, 0.5, 1.0);
    const auto full = apply_generator(rho, p, Correlator::gaussian(), Potential::free());
    const auto kin_only =
        apply_generator(rho, p, Correlator::gaussian(), Potential::free(), true, false);
    CHECK(linf_distance(full, kin_only) < 1e-14);
}

TEST_CASE("harmonic coherent state follows the closed-form trajectory") {
    const double k_stiff = 1.0, q0 = 1.0;
    PhysicalParams p(1.0, 1.0, 1.0, 0.0, 1.0);
    const auto rho0 = oracles::coherent_state_rho(128, 128, 24.0, 24.0, q0, 0.0, p.mass,
                                                  p.hbar, k_stiff, 0.0);
    SolverOptions opts;
    const double half_period = std::numbers::pi;
    opts.n_steps = 600;
    opts.dt = half_period / opts.n_steps;
    opts.snapshot_stride = opts.n_steps;
    const auto traj =
        evolve(rho0, p, Correlator::gaussian(), Potential::harmonic(k_stiff), opts);
    REQUIRE(traj.status == RunStatus::Completed);
    const auto expect = oracles::coherent_state_rho(128, 128, 24.0, 24.0, q0, 0.0, p.mass,
                                                    p.hbar, k_stiff, half_period);
    CHECK(linf_distance(traj.final_state(), expect) < 2e-4);

    // Unitary run conserves the L2 norm and all monitors stay at machine level.
    CHECK(traj.final_state().l2_norm() == doctest::Approx(rho0.l2_norm()).epsilon(1e-10));
    for (const auto& rec : traj.conservation_log) {
        CHECK(rec.trace_defect < 1e-10);
        CHECK(rec.hermiticity_defect < 1e-10);
    }
}

TEST_CASE("infinite-mass switches reproduce the decoherence limit") {
    PhysicalParams p(1.0, 1.0, 1.0, 1.2, 1.0);
    const auto g = Correlator::gaussian();
    const auto rho0 = DensityMatrixGrid::gaussian_pure(64, 64, 20.0, 20.0, 0.2, 1.0, 0.4, 1.0);
    SolverOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 150;
    opts.snapshot_stride = 150;
    opts.disable_kinetic = true;
    opts.disable_friction = true;
    const auto traj = evolve(rho0, p, g, Potential::free(), opts);
    REQUIRE(traj.status == RunStatus::Completed);
    const auto expect = decoherence_limit(rho0, p, g, 1.5);
    // Relative agreement on the grid scale.
    double rel = 0.0;
    for (std::size_t i = 0; i < expect.size(); ++i) {
        const double denom = std::max(std::abs(expect.data()[i]), 1e-8);
        rel = std::max(rel,
                       std::abs(traj.final_state().data()[i] - expect.data()[i]) / denom);
    }
    CHECK(rel < 1e-6);
}

TEST_CASE("dissipativity: off-diagonal mass decays in the decoherence configuration") {
    PhysicalParams p(1.0, 1.0, 1.0, 1.0, 1.0);
    const auto rho0 = DensityMatrixGrid::gaussian_pure(32, 64, 12.0, 16.0, 0.0, 1.0, 0.3, 1.0);
    SolverOptions opts;
    opts.dt = 0.05;
    opts.n_steps = 40;
    opts.snapshot_stride = 1;
    opts.disable_kinetic = true;
    opts.disable_friction = true;
    const auto traj = evolve(rho0, p, Correlator::gaussian(), Potential::free(), opts);
    REQUIRE(traj.status == RunStatus::Completed);
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        CHECK(traj.snapshots[i].offdiagonal_mass() <=
              traj.snapshots[i - 1].offdiagonal_mass() * (1.0 + 1e-13));
    }
}

TEST_CASE("residual of the decoherence closed form in the reduced equation") {
    PhysicalParams p(1.0, 1.0, 1.0, 1.0, 1.0);
    const auto g = Correlator::gaussian();
    const auto rho0 = DensityMatrixGrid::gaussian_pure(32, 64, 12.0, 16.0, 0.0, 1.0, 0.0, 1.0);
    const double t = 0.8, h = 5e-5;
    std::vector<DensityMatrixGrid> trio = {decoherence_limit(rho0, p, g, t - h),
                                           decoherence_limit(rho0, p, g, t),
                                           decoherence_limit(rho0, p, g, t + h)};
    const double r = residual_norm(trio, p, g, Potential::free(), false, false);
    CHECK(r < 1e-8);

    std::vector<DensityMatrixGrid> two = {trio[0], trio[1]};
    CHECK_THROWS_AS(residual_norm(two, p, g, Potential::free()), std::domain_error);
}

TEST_CASE("evolver self-consistency residual") {
    PhysicalParams p(1.0, 1.0, 2.0, 1.0, 1.0);
    const auto g = Correlator::gaussian();
    const auto rho0 = DensityMatrixGrid::gaussian_pure(64, 64, 20.0, 16.0, 0.0, 1.0, 0.5, 1.0);
    SolverOptions opts;
    opts.dt = 5e-4;
    opts.n_steps = 200;
    opts.snapshot_stride = 1;
    const auto traj = evolve(rho0, p, g, Potential::free(), opts);
    REQUIRE(traj.status == RunStatus::Completed);
    const std::vector<DensityMatrixGrid> trio = {traj.snapshots[99], traj.snapshots[100],
                                                 traj.snapshots[101]};
    CHECK(residual_norm(trio, p, g, Potential::free()) < 1e-4);
}

TEST_CASE("strang splitting self-convergence is at least second order") {
    PhysicalParams p(1.0, 1.0, 2.0, 2.0, 1.0);
    const auto g = Correlator::gaussian();
    const auto u = Potential::harmonic(0.7);
    const auto rho0 = DensityMatrixGrid::gaussian_pure(64, 64, 20.0, 16.0, 0.3, 1.0, 0.4, 1.0);
    const double t_final = 0.4;

    auto run = [&](int steps) {
        SolverOptions opts;
        opts.dt = t_final / steps;
        opts.n_steps = steps;
        opts.snapshot_stride = steps;
        return evolve(rho0, p, g, u, opts).final_state();
    };
    const auto ref = run(1024);
    const double e1 = linf_distance(run(64), ref);
    const double e2 = linf_distance(run(128), ref);
    const double e4 = linf_distance(run(256), ref);
    CHECK(e1 / e2 > 3.5);  // order >= 2 gives a factor of 4
    CHECK(e2 / e4 > 3.5);
}

TEST_CASE("rk4 spectral scheme agrees with strang on a short run") {
    PhysicalParams p(1.0, 1.0, 2.0, 1.0, 1.0);
    const auto g = Correlator::gaussian();
    const auto rho0 = DensityMatrixGrid::gaussian_pure(64, 64, 16.0, 16.0, 0.0, 1.0, 0.2, 1.0);
    SolverOptions opts;
    opts.dt = 1e-3;
    opts.n_steps = 100;
    opts.snapshot_stride = 100;
    const auto strang = evolve(rho0, p, g, Potential::free(), opts);
    opts.scheme = Scheme::Rk4Spectral;
    const auto rk4 = evolve(rho0, p, g, Potential::free(), opts);
    REQUIRE(strang.status == RunStatus::Completed);
    REQUIRE(rk4.status == RunStatus::Completed);
    CHECK(linf_distance(strang.final_state(), rk4.final_state()) < 1e-6);
}

TEST_CASE("conservation log length equals the number of executed steps") {
    PhysicalParams p(1.0, 1.0, 1.0, 0.5, 1.0);
    const auto rho0 = DensityMatrixGrid::gaussian_pure(32, 32, 12.0, 12.0, 0.0, 1.0, 0.0, 1.0);
    SolverOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 37;
    opts.snapshot_stride = 10;
    const auto traj = evolve(rho0, p, Correlator::gaussian(), Potential::free(), opts);
    CHECK(traj.conservation_log.size() == 37);
    // Snapshot times strictly increase.
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
        CHECK(traj.snapshots[i].time_stamp > traj.snapshots[i - 1].time_stamp);
}

TEST_CASE("early stop on trace drift") {
    PhysicalParams p(1.0, 1.0, 1.0, 0.5, 1.0);
    const auto rho0 = DensityMatrixGrid::gaussian_pure(32, 32, 12.0, 12.0, 0.0, 1.0, 0.0, 1.0);
    SolverOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 50;
    opts.trace_tol = 1e-18;  // below machine noise: trips immediately
    const auto traj = evolve(rho0, p, Correlator::gaussian(), Potential::free(), opts);
    CHECK(traj.status == RunStatus::EarlyStopTrace);
    CHECK(!traj.message.empty());
}

TEST_CASE("non-finite state aborts with the last valid snapshot") {
    PhysicalParams p(1.0, 1.0, 1.0, 0.5, 1.0);
    auto rho0 = DensityMatrixGrid::gaussian_pure(32, 32, 12.0, 12.0, 0.0, 1.0, 0.0, 1.0);
    rho0.at(5, 5) = cdouble(std::numeric_limits<double>::infinity(), 0.0);
    SolverOptions opts;
    opts.dt = 0.01;
    opts.n_steps = 10;
    const auto traj = evolve(rho0, p, Correlator::gaussian(), Potential::free(), opts);
    CHECK(traj.status == RunStatus::AbortedNonFinite);
    CHECK(traj.snapshots.size() >= 2);
}

TEST_CASE("coarse positivity monitor sees a positive state") {
    PhysicalParams p(1.0, 1.0, 1.0, 0.5, 1.0);
    const auto rho0 = DensityMatrixGrid::gaussian_pure(64, 64, 20.0, 20.0, 0.0, 1.0, 0.0, 1.0);
    const double lam = coarse_min_eigenvalue(rho0, 16);
    CHECK(lam > -1e-10);
}
