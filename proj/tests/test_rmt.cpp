#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "qkin/errors.hpp"
#include "qkin/rmt.hpp"

using namespace qkin;

namespace {

EnsembleSpec base_spec(SymmetryClass cls, int n) {
    EnsembleSpec s;
    s.dimension = n;
    s.symmetry = cls;
    s.rho0 = 1.0;
    s.beta = 0.0;  // uniform level spacing
    s.kappa0 = 10.0;
    s.spreading_width = 1.0;
    s.correlation_length = 1.0;
    s.correlator = Correlator::gaussian();
    s.x_points = {0.0, 1.0};
    return s;
}

}  // namespace

TEST_CASE("reference spectrum examples") {
    auto s = base_spec(SymmetryClass::GOE, 4);
    s.rho0 = 1.0;
    s.beta = 1.0;
    const auto eps = reference_spectrum(s);
    CHECK(eps[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    s.beta = 0.0;
    const auto uniform = reference_spectrum(s);
    for (int k = 0; k < 4; ++k) CHECK(uniform[k] == doctest::Approx(k + 1.0));
}

TEST_CASE("reference spectrum density recovers beta by a spacing fit") {
    auto s = base_spec(SymmetryClass::GOE, 2000);
    s.rho0 = 2.0;
    s.beta = 0.5;
    const auto eps = reference_spectrum(s);
    // Local density is 1/spacing; ln rho is linear in eps with slope beta.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
        const double x = 0.5 * (eps[k] + eps[k + 1]);
        const double y = std::log(1.0 / (eps[k + 1] - eps[k]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double beta_hat = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(beta_hat == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("samples satisfy their symmetry class exactly") {
    const std::uint64_t seed = 2024;

    const auto goe = sample_bath(base_spec(SymmetryClass::GOE, 16), seed);
    for (const auto& h : goe.h) {
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(h.imag().cwiseAbs().maxCoeff() == 0.0);
    }

    const auto gue = sample_bath(base_spec(SymmetryClass::GUE, 16), seed);
    bool has_complex = false;
    for (const auto& h : gue.h) {
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        has_complex = has_complex || h.imag().cwiseAbs().maxCoeff() > 0.0;
    }
    CHECK(has_complex);

    const auto gse = sample_bath(base_spec(SymmetryClass::GSE, 16), seed);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(16, 16);
    for (int a = 0; a < 8; ++a) {
        J(2 * a, 2 * a + 1) = 1.0;
        J(2 * a + 1, 2 * a) = -1.0;
    }
    for (const auto& h : gse.h) {
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        // Self-duality: J conj(H) J^{-1} = H.
        const Eigen::MatrixXcd dual = J * h.conjugate() * J.inverse();
        CHECK((dual - h).cwiseAbs().maxCoeff() < 1e-14);
    }

    CHECK_THROWS_AS(sample_bath(base_spec(SymmetryClass::GSE, 15), seed),
                    std::invalid_argument);
}

TEST_CASE("coincident parameter points give identical matrices") {
    auto s = base_spec(SymmetryClass::GOE, 12);
    s.x_points = {0.7, 0.7};
    const auto sample = sample_bath(s, 99);
    CHECK((sample.h[0] - sample.h[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("distant parameter points decorrelate") {
    auto s = base_spec(SymmetryClass::GOE, 4);
    s.x_points = {0.0, 10.0};  // G(10) ~ e^-50
    CHECK(s.correlator.eval(10.0) < 1e-20);
    const int n_samples = 40000;
    double sum_uv = 0, sum_u = 0, sum_v = 0, sum_u2 = 0, sum_v2 = 0;
    for (int i = 0; i < n_samples; ++i) {
        const auto sample = sample_bath(s, 4242, i);
        const double u = sample.h[0](0, 1).real();
        const double v = sample.h[1](0, 1).real();
        sum_uv += u * v;
        sum_u += u;
        sum_v += v;
        sum_u2 += u * u;
        sum_v2 += v * v;
    }
    const double cov = (sum_uv - sum_u * sum_v / n_samples) / (n_samples - 1);
    const double vu = (sum_u2 - sum_u * sum_u / n_samples) / (n_samples - 1);
    const double vv = (sum_v2 - sum_v * sum_v / n_samples) / (n_samples - 1);
    CHECK(std::abs(cov / std::sqrt(vu * vv)) < 0.016);  // ~3 SE at 40k samples
}

TEST_CASE("GOE band-center diagonal variance is doubled") {
    auto s = base_spec(SymmetryClass::GOE, 8);
    s.x_points = {0.0};
    const auto eps = effective_level_energies(s);
    const int k = 4;
    const double sigma2 = pair_variance(s, eps, k, k);
    const int n_samples = 50000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n_samples; ++i) {
        const auto sample = sample_bath(s, 7, i);
        const double v = sample.h[0](k, k).real() - sample.eps[k];
        sum += v;
        sum2 += v * v;
    }
    const double var = (sum2 - sum * sum / n_samples) / (n_samples - 1);
    // 2 sigma^2 within ~3 standard errors of a chi^2 variance estimate.
    CHECK(var == doctest::Approx(2.0 * sigma2).epsilon(3.0 * std::sqrt(2.0 / n_samples)));
}

TEST_CASE("entry covariance across X follows G at one correlation length") {
    auto s = base_spec(SymmetryClass::GUE, 8);
    s.x_points = {0.0, 1.0};  // |dX| = X0, Gaussian G -> e^{-1/2}
    const auto eps = effective_level_energies(s);
    const int k = 2, l = 5;
    const double sigma2 = pair_variance(s, eps, k, l);
    const int n_samples = 10000;
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const auto sample = sample_bath(s, 21, i);
        acc += (sample.h[0](k, l) * std::conj(sample.h[1](k, l))).real();
    }
    const double cov = acc / n_samples;
    const double expect = sigma2 * std::exp(-0.5);
    const double se = sigma2 * std::sqrt((1.0 + std::exp(-1.0)) / n_samples);
    CHECK(std::abs(cov - expect) < 3.0 * se);
}

TEST_CASE("verify_covariance passes on a healthy ensemble and guards sample count") {
    auto s = base_spec(SymmetryClass::GOE, 24);
    std::vector<BathSample> samples;
    for (int i = 0; i < 400; ++i) samples.push_back(sample_bath(s, 31, i));
    const auto report = verify_covariance(samples, s);
    CHECK(report.passed);
    CHECK(report.n_samples == 400);
    CHECK(report.law_within_3se_fraction >= 0.95);
    CHECK(report.max_abs_z_structural <= 4.5);
    CHECK(!report.summary().empty());

    samples.resize(50);
    CHECK_THROWS_AS(verify_covariance(samples, s), std::domain_error);
}

TEST_CASE("audit indices disjoint from the pair deltas come out zero") {
    auto s = base_spec(SymmetryClass::GOE, 16);
    AuditOptions opts;
    opts.n_law_entries = 4;
    opts.n_zero_entries = 60;
    const auto report = run_covariance_audit(s, 500, 13, opts);
    int zeros = 0;
    for (const auto& e : report.entries)
        if (e.structural_zero) {
            CHECK(e.theory == 0.0);
            ++zeros;
        }
    CHECK(zeros > 0);
    CHECK(report.max_abs_z_structural <= 4.5);
}

TEST_CASE("non positive semidefinite correlator is rejected") {
    auto s = base_spec(SymmetryClass::GOE, 4);
    s.correlator = Correlator::levy(1.9);
    s.x_points = {0.0, 1.2, 2.4};
    CHECK_THROWS_AS(sample_bath(s, 5), invalid_correlator_error);
}

TEST_CASE("wide band indicator and warning") {
    auto s = base_spec(SymmetryClass::GOE, 16);
    s.kappa0 = 100.0;
    CHECK(s.wide_band_indicator() == doctest::Approx(100.0));
    s.kappa0 = 0.5;
    const auto report = run_covariance_audit(s, 120, 3);
    CHECK(report.wide_band_warning);
}

TEST_CASE("empirical band profile recovers kappa0") {
    auto s = base_spec(SymmetryClass::GOE, 400);
    s.kappa0 = 30.0;
    s.x_points = {0.0};
    const int n_samples = 500;
    const auto eps = effective_level_energies(s);

    // Mean squared entry by energy offset d = |k - l|; beta = 0 makes the
    // level-density prefactor constant, so the offset dependence is the
    // Gaussian band factor alone: ln E[H_kl^2] = const - d^2 / (2 kappa0^2).
    (void)eps;
    const int max_d = 60;
    std::vector<double> acc(max_d + 1, 0.0);
    std::vector<long> cnt(max_d + 1, 0);
    for (int i = 0; i < n_samples; ++i) {
        const auto sample = sample_bath(s, 1717, i);
        for (int k = 0; k < 400; k += 3) {
            for (int d = 4; d <= max_d; d += 4) {
                const int l = k + d;
                if (l >= 400) continue;
                const double v = sample.h[0](k, l).real();
                acc[d] += v * v;
                cnt[d] += 1;
            }
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int d = 4; d <= max_d; d += 4) {
        if (cnt[d] == 0) continue;
        const double de2 = static_cast<double>(d) * d;  // unit spacing
        const double y = std::log(acc[d] / cnt[d]);
        sx += de2;
        sy += y;
        sxx += de2 * de2;
        sxy += de2 * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double kappa_hat = std::sqrt(-1.0 / (2.0 * slope));
    CHECK(kappa_hat == doctest::Approx(30.0).epsilon(0.05));
}
