#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkin/correlator.hpp"

namespace qkin {

using cdouble = std::complex<double>;

enum class SymmetryClass { GOE, GUE, GSE };

std::string to_string(SymmetryClass c);

// Parametric banded random-matrix bath: level density rho(e) = rho0 e^{beta e},
// Gaussian band profile of width kappa0, entry covariance across parameter
// points given by G((X_i - X_j)/X0) times the second-cumulant scale.
struct EnsembleSpec {
    int dimension = 2;  // complex dimension N; GSE uses N/2 quaternion indices
    SymmetryClass symmetry = SymmetryClass::GOE;
    double rho0 = 1.0;
    double beta = 0.0;
    double kappa0 = 1.0;
    double spreading_width = 1.0;
    double correlation_length = 1.0;
    Correlator correlator = Correlator::gaussian();
    std::vector<double> x_points = {0.0};

    void validate() const;

    // kappa0 * rho(eps_mid); the kinetic-equation regime needs >> 1 and the
    // sampler warns below 10.
    double wide_band_indicator() const;
};

struct BathSample {
    std::vector<Eigen::MatrixXcd> h;  // one matrix per parameter point
    std::vector<double> eps;          // diagonal reference spectrum actually used
};

// Deterministic unfolded spectrum: eps_k = ln(1 + k beta / rho0) / beta,
// k = 1..N (the beta -> 0 limit is k / rho0).
std::vector<double> reference_spectrum(const EnsembleSpec& spec);

// Energies indexed the way the sampler indexes independent entries:
// the first N values for GOE/GUE, the first N/2 for GSE quaternion indices.
std::vector<double> effective_level_energies(const EnsembleSpec& spec);

// Second-cumulant scale sigma^2_{kl} = Gamma / (2 pi sqrt(rho_k rho_l)) *
// exp(-(eps_k - eps_l)^2 / (2 kappa0^2)), zero-based k, l.
double pair_variance(const EnsembleSpec& spec, const std::vector<double>& eps, int k, int l);

// Draw one bath sample; entries are Gaussian processes over the X points.
// Throws invalid_correlator_error when the X covariance fails positive
// semidefiniteness beyond the 1e-12 clip tolerance.
BathSample sample_bath(const EnsembleSpec& spec, std::uint64_t seed,
                       std::uint64_t sample_index = 0);

struct AuditEntry {
    int k, l, m, n;       // zero-based canonical index pairs (k <= l, m <= n)
    int xi, xj;           // parameter-point indices
    bool structural_zero;
    double theory = 0.0;
    double empirical = 0.0;
    double std_err = 0.0;
    double z = 0.0;
};

struct CovarianceReport {
    int n_samples = 0;
    std::vector<AuditEntry> entries;
    int n_law = 0;
    int n_law_within_3se = 0;
    double law_within_3se_fraction = 0.0;
    double max_abs_z_structural = 0.0;
    double wide_band_indicator = 0.0;
    bool wide_band_warning = false;
    bool passed = false;

    std::string summary() const;
};

struct AuditOptions {
    int n_law_entries = 160;
    int n_zero_entries = 80;
    std::uint64_t audit_seed = 0xa0d17;
    // Restrict audited indices to [0, max_index); 0 means the full effective
    // dimension. Cross-class comparisons use the common quaternion range.
    int max_index = 0;
};

// Streaming two-point accumulator over samples for a fixed audit set.
class CovarianceAuditor {
  public:
    CovarianceAuditor(const EnsembleSpec& spec, const AuditOptions& opts = {});

    void add_sample(const BathSample& sample);
    CovarianceReport report() const;

    const std::vector<AuditEntry>& audit_set() const { return entries_; }

  private:
    struct Accum {
        double sum_uv = 0.0;
        double sum_u[4] = {0, 0, 0, 0};
        double sum_v[4] = {0, 0, 0, 0};
    };

    EnsembleSpec spec_;
    std::vector<double> energies_;
    std::vector<AuditEntry> entries_;
    std::vector<Accum> accum_;
    int n_samples_ = 0;
    int components_ = 1;
};

// Audit a pre-generated collection of samples (>= 100 required).
CovarianceReport verify_covariance(std::span<const BathSample> samples,
                                   const EnsembleSpec& spec, const AuditOptions& opts = {});

// Generate-and-audit without retaining samples.
CovarianceReport run_covariance_audit(const EnsembleSpec& spec, int n_samples,
                                      std::uint64_t seed, const AuditOptions& opts = {});

}  // namespace qkin
