#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkin/density_grid.hpp"
#include "qkin/physical_params.hpp"

namespace qkin {

// Phase-space quasi-distribution W(r, p) on the momentum grid conjugate
// to the s axis: p spans [-pi hbar/ds, pi hbar/ds) with np = ns points.
struct WignerGrid {
    int nr = 0, np = 0;
    double r_extent = 0.0, p_extent = 0.0;
    std::vector<double> w;  // row-major, r index major

    double dr() const { return r_extent / nr; }
    double dp() const { return p_extent / np; }
    double r_at(int ir) const { return -0.5 * r_extent + ir * dr(); }
    double p_at(int ip) const { return -0.5 * p_extent + ip * dp(); }
    double& at(int ir, int ip) { return w[static_cast<std::size_t>(ir) * np + ip]; }
    double at(int ir, int ip) const { return w[static_cast<std::size_t>(ir) * np + ip]; }
};

// W(r, p) = (1/2 pi hbar) Int ds e^{-i p s / hbar} rho(r, s).
WignerGrid wigner_transform(const DensityMatrixGrid& rho, const PhysicalParams& p);

// Marginals: dp-sum over momentum gives the position density, dr-sum over
// position gives the momentum density.
std::vector<double> wigner_position_marginal(const WignerGrid& w);
std::vector<double> wigner_momentum_marginal(const WignerGrid& w);

// Momentum density and its grid, computed directly from chi(s) without
// building the full Wigner function.
struct MomentumMarginal {
    std::vector<double> p;
    std::vector<double> density;
};
MomentumMarginal momentum_marginal(const DensityMatrixGrid& rho, const PhysicalParams& params);

struct CumulantEstimate {
    double value = 0.0;
    double error_bound = 0.0;  // spacing-halving difference plus roundoff floor
};

// Cumulants of the momentum distribution from derivatives of ln chi at
// s = 0, scaled by (-i hbar)^n; centered stencils of order >= 8.
// Throws unnormalized_state_error if |chi(0) - 1| > 1e-6 and
// std::domain_error for max_order > 8. Entry [n-1] holds order n.
std::vector<CumulantEstimate> momentum_cumulants(const DensityMatrixGrid& rho,
                                                 const PhysicalParams& p, int max_order);

// Cumulants of the coordinate distribution rho(r, 0) via grid moments.
std::vector<CumulantEstimate> coordinate_cumulants(const DensityMatrixGrid& rho,
                                                   const PhysicalParams& p, int max_order);

struct PowerLawFit {
    double exponent = 0.0;        // nu in y = A t^nu
    double exponent_err = 0.0;
    double prefactor = 0.0;       // A
    double prefactor_err = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    int n_points = 0;
    double r_squared = 0.0;
};

// Least-squares fit of ln y against ln t over the window [t_lo, t_hi].
// Requires >= 10 points in the window, all values positive.
PowerLawFit fit_diffusion_exponent(const std::vector<double>& times,
                                   const std::vector<double>& values, double t_lo,
                                   double t_hi);

// Time series of cumulants extracted from a sequence of snapshots.
struct CumulantKey {
    char variable;  // 'Q' or 'P'
    int order;
    bool operator<(const CumulantKey& o) const {
        return variable != o.variable ? variable < o.variable : order < o.order;
    }
};

struct CumulantSeries {
    std::vector<double> times;
    std::map<CumulantKey, std::vector<double>> cumulants;
    std::optional<PowerLawFit> q2_fit;

    const std::vector<double>& series(char variable, int order) const;
    void append(double t, const std::vector<CumulantEstimate>& q_cums,
                const std::vector<CumulantEstimate>& p_cums);
};

struct StableTailOptions {
    // Regression window on |chi|; points with |chi| in (chi_lo, chi_hi).
    double chi_lo = 0.05;
    double chi_hi = 0.80;
    int n_points = 48;
    // Explicit s-window overrides the automatic |chi|-based choice.
    double s_lo = 0.0, s_hi = 0.0;
};

struct TailIndexEstimate {
    double alpha = 0.0;
    double alpha_err = 0.0;
    int n_points = 0;
    double s_lo = 0.0, s_hi = 0.0;
};

// Stability index from the characteristic function of a momentum marginal:
// regress ln(-ln |chi(s)|) against ln s, chi(s) = Int dp e^{i s p / hbar} f(p).
TailIndexEstimate stable_tail_index(const MomentumMarginal& marginal,
                                    const PhysicalParams& params,
                                    const StableTailOptions& opts = {});

// Exceedance mass ratios of a density against a moment-matched Gaussian at
// the given two-sided quantiles (e.g. 1e-2, 1e-3, 1e-4).
std::vector<double> tail_exceedance_ratios(const std::vector<double>& x,
                                           const std::vector<double>& density, double dx,
                                           const std::vector<double>& quantiles);

}  // namespace qkin
