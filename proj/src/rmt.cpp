#include "qkin/rmt.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qkin/errors.hpp"
#include "qkin/rng.hpp"

namespace qkin {

namespace {

// Independent real components per canonical entry: GOE carries one, GUE a
// complex pair off the diagonal, GSE a quaternion. Diagonals are real in
// every class and carry the doubled variance of the pair-delta law.
int n_components(SymmetryClass c, bool diagonal) {
    if (diagonal) return 1;
    switch (c) {
        case SymmetryClass::GOE: return 1;
        case SymmetryClass::GUE: return 2;
        case SymmetryClass::GSE: return 4;
    }
    return 1;
}

struct XFactor {
    Eigen::MatrixXd l;  // cov = l l^T after eigenvalue clipping
    int points;
};

XFactor x_covariance_factor(const EnsembleSpec& spec) {
    const int np = static_cast<int>(spec.x_points.size());
    Eigen::MatrixXd cov(np, np);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
            cov(i, j) = spec.correlator.eval((spec.x_points[i] - spec.x_points[j]) /
                                             spec.correlation_length);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < np; ++i) {
        if (lam[i] < -1e-12 * lam_max)
            throw invalid_correlator_error(
                "correlator gives a non-positive-semidefinite X covariance (eigenvalue " +
                std::to_string(lam[i]) + ")");
        lam[i] = std::max(lam[i], 0.0);
    }
    XFactor f;
    f.points = np;
    f.l = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    return f;
}

// Deterministic normal draws for entry (k,l), component c, across X points.
void entry_process(const CounterRng& rng, std::uint64_t sample_index, std::uint64_t eid,
                   int comp, const XFactor& xf, double sigma_c, double* out) {
    const int np = xf.points;
    Eigen::VectorXd xi(np);
    for (int t = 0; t < np; t += 2) {
        const std::uint64_t id0 = (0xB47Dull << 40) | sample_index;
        const std::uint64_t id1 = (eid * 4 + comp) * 256 + (t / 2);
        const auto [z1, z2] = rng.normal_pair(id0, id1);
        xi[t] = z1;
        if (t + 1 < np) xi[t + 1] = z2;
    }
    const Eigen::VectorXd y = xf.l * xi;
    for (int i = 0; i < np; ++i) out[i] = sigma_c * y[i];
}

void extract_components(const BathSample& sample, SymmetryClass cls, int k, int l, int xi,
                        double out[4]) {
    const auto& h = sample.h[xi];
    if (cls == SymmetryClass::GSE) {
        if (k == l) {
            out[0] = h(2 * k, 2 * k).real();
            return;
        }
        const cdouble a = h(2 * k, 2 * l);
        const cdouble b = h(2 * k, 2 * l + 1);
        out[0] = a.real();
        out[1] = a.imag();
        out[2] = b.real();
        out[3] = b.imag();
        return;
    }
    const cdouble v = h(k, l);
    out[0] = v.real();
    if (cls == SymmetryClass::GUE && k != l) out[1] = v.imag();
}

}  // namespace

std::string to_string(SymmetryClass c) {
    switch (c) {
        case SymmetryClass::GOE: return "GOE";
        case SymmetryClass::GUE: return "GUE";
        case SymmetryClass::GSE: return "GSE";
    }
    return "?";
}

void EnsembleSpec::validate() const {
    if (dimension < 2) throw std::invalid_argument("EnsembleSpec: dimension must be >= 2");
    if (!(kappa0 > 0.0)) throw std::invalid_argument("EnsembleSpec: kappa0 must be > 0");
    if (!(rho0 > 0.0)) throw std::invalid_argument("EnsembleSpec: rho0 must be > 0");
    if (beta < 0.0) throw std::invalid_argument("EnsembleSpec: beta must be >= 0");
    if (!(spreading_width > 0.0))
        throw std::invalid_argument("EnsembleSpec: spreading_width must be > 0");
    if (!(correlation_length > 0.0))
        throw std::invalid_argument("EnsembleSpec: correlation_length must be > 0");
    if (symmetry == SymmetryClass::GSE && dimension % 2 != 0)
        throw std::invalid_argument("EnsembleSpec: GSE requires even dimension");
    if (x_points.empty())
        throw std::invalid_argument("EnsembleSpec: at least one parameter point required");
}

std::vector<double> reference_spectrum(const EnsembleSpec& spec) {
    spec.validate();
    std::vector<double> eps(spec.dimension);
    for (int k = 1; k <= spec.dimension; ++k) {
        eps[k - 1] = spec.beta == 0.0 ? k / spec.rho0
                                      : std::log1p(k * spec.beta / spec.rho0) / spec.beta;
    }
    return eps;
}

std::vector<double> effective_level_energies(const EnsembleSpec& spec) {
    auto eps = reference_spectrum(spec);
    if (spec.symmetry == SymmetryClass::GSE) eps.resize(spec.dimension / 2);
    return eps;
}

double pair_variance(const EnsembleSpec& spec, const std::vector<double>& eps, int k, int l) {
    const double rho_k = spec.rho0 * std::exp(spec.beta * eps[k]);
    const double rho_l = spec.rho0 * std::exp(spec.beta * eps[l]);
    const double de = eps[k] - eps[l];
    return spec.spreading_width / (2.0 * std::numbers::pi * std::sqrt(rho_k * rho_l)) *
           std::exp(-de * de / (2.0 * spec.kappa0 * spec.kappa0));
}

double EnsembleSpec::wide_band_indicator() const {
    const auto eps = reference_spectrum(*this);
    const double mid = eps[dimension / 2 - 1];
    return kappa0 * rho0 * std::exp(beta * mid);
}

BathSample sample_bath(const EnsembleSpec& spec, std::uint64_t seed,
                       std::uint64_t sample_index) {
    spec.validate();
    const auto energies = effective_level_energies(spec);
    const int neff = static_cast<int>(energies.size());
    const int np = static_cast<int>(spec.x_points.size());
    const XFactor xf = x_covariance_factor(spec);
    const CounterRng rng(seed);

    BathSample sample;
    sample.h.assign(np, Eigen::MatrixXcd::Zero(spec.dimension, spec.dimension));

    double values[4][32];
    if (np > 32) throw std::invalid_argument("sample_bath: at most 32 parameter points");

    for (int k = 0; k < neff; ++k) {
        for (int l = k; l < neff; ++l) {
            const double sigma2 = pair_variance(spec, energies, k, l);
            const bool diag = (k == l);
            const int d = n_components(spec.symmetry, diag);
            const double total = (diag ? 2.0 : 1.0) * sigma2;
            const double sigma_c = std::sqrt(total / d);
            const std::uint64_t eid = static_cast<std::uint64_t>(k) * neff + l;
            for (int c = 0; c < d; ++c)
                entry_process(rng, sample_index, eid, c, xf, sigma_c, values[c]);

            for (int ix = 0; ix < np; ++ix) {
                auto& h = sample.h[ix];
                switch (spec.symmetry) {
                    case SymmetryClass::GOE: {
                        h(k, l) = values[0][ix];
                        h(l, k) = values[0][ix];
                        break;
                    }
                    case SymmetryClass::GUE: {
                        if (diag) {
                            h(k, k) = values[0][ix];
                        } else {
                            const cdouble z(values[0][ix], values[1][ix]);
                            h(k, l) = z;
                            h(l, k) = std::conj(z);
                        }
                        break;
                    }
                    case SymmetryClass::GSE: {
                        if (diag) {
                            h(2 * k, 2 * k) = values[0][ix];
                            h(2 * k + 1, 2 * k + 1) = values[0][ix];
                        } else {
                            // Quaternion q -> [[a+ib, c+id], [-c+id, a-ib]].
                            const double a = values[0][ix], b = values[1][ix];
                            const double c = values[2][ix], dq = values[3][ix];
                            Eigen::Matrix2cd blk;
                            blk << cdouble(a, b), cdouble(c, dq), cdouble(-c, dq),
                                cdouble(a, -b);
                            h.block<2, 2>(2 * k, 2 * l) = blk;
                            h.block<2, 2>(2 * l, 2 * k) = blk.adjoint();
                        }
                        break;
                    }
                }
            }
        }
    }

    // Reference spectrum on the diagonal (Kramers-degenerate for GSE).
    sample.eps.resize(spec.dimension);
    for (int i = 0; i < spec.dimension; ++i) {
        const int idx = spec.symmetry == SymmetryClass::GSE ? i / 2 : i;
        sample.eps[i] = energies[idx];
        for (auto& h : sample.h) h(i, i) += energies[idx];
    }
    return sample;
}

CovarianceAuditor::CovarianceAuditor(const EnsembleSpec& spec, const AuditOptions& opts)
    : spec_(spec) {
    spec_.validate();
    energies_ = effective_level_energies(spec_);
    const int neff = static_cast<int>(energies_.size());
    const int np = static_cast<int>(spec_.x_points.size());
    const int hi = opts.max_index > 0 ? std::min(opts.max_index, neff) : neff;

    const CounterRng rng(opts.audit_seed);
    std::uint64_t draw = 0;
    auto uniform_int = [&](int n) {
        return std::min(n - 1, static_cast<int>(rng.uniform(0xA0D1ull, draw++) * n));
    };
    auto canonical_pair = [&](int& k, int& l) {
        k = uniform_int(hi);
        l = uniform_int(hi);
        if (k > l) std::swap(k, l);
    };

    // Law entries: covariance of an entry with itself across X pairs. The
    // first entry pins the band-center diagonal at coincident points.
    for (int e = 0; e < opts.n_law_entries; ++e) {
        AuditEntry a{};
        if (e == 0) {
            a.k = a.l = hi / 2;
            a.xi = a.xj = 0;
        } else {
            canonical_pair(a.k, a.l);
            a.xi = uniform_int(np);
            a.xj = uniform_int(np);
        }
        a.m = a.k;
        a.n = a.l;
        a.structural_zero = false;
        entries_.push_back(a);
    }
    // Structural zeros: distinct canonical pairs, half sharing one index.
    for (int e = 0; e < opts.n_zero_entries; ++e) {
        AuditEntry a{};
        for (int attempt = 0; attempt < 256; ++attempt) {
            canonical_pair(a.k, a.l);
            if (e % 2 == 0 && hi >= 3) {
                a.m = a.k;  // shared first index
                a.n = uniform_int(hi);
                if (a.m > a.n) std::swap(a.m, a.n);
            } else {
                canonical_pair(a.m, a.n);
            }
            if (a.k != a.m || a.l != a.n) break;
        }
        if (a.k == a.m && a.l == a.n) continue;  // tiny dimensions; skip
        a.xi = uniform_int(np);
        a.xj = uniform_int(np);
        a.structural_zero = true;
        entries_.push_back(a);
    }
    accum_.assign(entries_.size(), Accum{});
}

void CovarianceAuditor::add_sample(const BathSample& sample) {
    double u[4] = {0, 0, 0, 0}, v[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        extract_components(sample, spec_.symmetry, e.k, e.l, e.xi, u);
        extract_components(sample, spec_.symmetry, e.m, e.n, e.xj, v);
        const int du = n_components(spec_.symmetry, e.k == e.l);
        const int dv = n_components(spec_.symmetry, e.m == e.n);
        const int d = std::min(du, dv);
        auto& acc = accum_[i];
        for (int c = 0; c < d; ++c) {
            acc.sum_uv += u[c] * v[c];
            acc.sum_u[c] += u[c];
            acc.sum_v[c] += v[c];
        }
    }
    ++n_samples_;
}

CovarianceReport CovarianceAuditor::report() const {
    if (n_samples_ < 100)
        throw std::domain_error("verify_covariance: need at least 100 samples");

    CovarianceReport rep;
    rep.n_samples = n_samples_;
    rep.entries = entries_;
    rep.wide_band_indicator = spec_.wide_band_indicator();
    rep.wide_band_warning = rep.wide_band_indicator < 10.0;

    const double s = n_samples_;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto& e = rep.entries[i];
        const auto& acc = accum_[i];
        const int du = n_components(spec_.symmetry, e.k == e.l);
        const int dv = n_components(spec_.symmetry, e.m == e.n);
        const int d = std::min(du, dv);

        double cross = 0.0;
        for (int c = 0; c < d; ++c) cross += acc.sum_u[c] * acc.sum_v[c];
        e.empirical = (acc.sum_uv - cross / s) / (s - 1.0);

        const double g = spec_.correlator.eval(
            (spec_.x_points[e.xi] - spec_.x_points[e.xj]) / spec_.correlation_length);
        const double var_u = (e.k == e.l ? 2.0 : 1.0) * pair_variance(spec_, energies_, e.k, e.l);
        const double var_v = (e.m == e.n ? 2.0 : 1.0) * pair_variance(spec_, energies_, e.m, e.n);

        double se2;
        if (e.structural_zero) {
            e.theory = 0.0;
            se2 = d * (var_u / du) * (var_v / dv) / (s - 1.0);
        } else {
            e.theory = var_u * g;
            const double per = var_u / du;
            se2 = du * (per * per + per * g * per * g) / (s - 1.0);
        }
        e.std_err = std::sqrt(se2);
        e.z = (e.empirical - e.theory) / e.std_err;

        if (e.structural_zero) {
            rep.max_abs_z_structural = std::max(rep.max_abs_z_structural, std::abs(e.z));
        } else {
            ++rep.n_law;
            if (std::abs(e.z) <= 3.0) ++rep.n_law_within_3se;
        }
    }
    rep.law_within_3se_fraction = rep.n_law > 0 ? double(rep.n_law_within_3se) / rep.n_law : 0.0;
    // 4.5 sigma keeps the familywise false-alarm rate of ~100 zero checks
    // near 0.1%.
    rep.passed = rep.law_within_3se_fraction >= 0.95 && rep.max_abs_z_structural <= 4.5;
    return rep;
}

std::string CovarianceReport::summary() const {
    std::ostringstream os;
    os << "covariance audit: " << n_samples << " samples, " << n_law << " law entries, "
       << entries.size() - n_law << " structural zeros\n";
    os << "  law entries within 3 SE: " << n_law_within_3se << "/" << n_law << " ("
       << 100.0 * law_within_3se_fraction << "%)\n";
    os << "  max |z| over structural zeros: " << max_abs_z_structural << "\n";
    os << "  wide-band indicator kappa0*rho(mid): " << wide_band_indicator
       << (wide_band_warning ? "  [WARNING: below 10, kinetic regime questionable]" : "")
       << "\n";
    os << "  verdict: " << (passed ? "PASS" : "FAIL") << "\n";
    return os.str();
}

CovarianceReport verify_covariance(std::span<const BathSample> samples,
                                   const EnsembleSpec& spec, const AuditOptions& opts) {
    if (samples.size() < 100)
        throw std::domain_error("verify_covariance: need at least 100 samples");
    CovarianceAuditor auditor(spec, opts);
    for (const auto& s : samples) auditor.add_sample(s);
    return auditor.report();
}

CovarianceReport run_covariance_audit(const EnsembleSpec& spec, int n_samples,
                                      std::uint64_t seed, const AuditOptions& opts) {
    if (n_samples < 100)
        throw std::domain_error("run_covariance_audit: need at least 100 samples");
    CovarianceAuditor auditor(spec, opts);
    for (int i = 0; i < n_samples; ++i) auditor.add_sample(sample_bath(spec, seed, i));
    return auditor.report();
}

}  // namespace qkin
