#pragma once

#include "qkin/correlator.hpp"
#include "qkin/density_grid.hpp"
#include "qkin/physical_params.hpp"

namespace qkin {

enum class ShiftInterp { Fourier, Cubic };

struct FreePropagateOptions {
    ShiftInterp interp = ShiftInterp::Fourier;
    // |k| below this multiple of hbar/ds routes to the analytic k -> 0 limit.
    double k_zero_factor = 1e-8;
};

// Largest t for which the spectral s-shift k t / M stays within the
// s-domain for every momentum column of this grid.
double free_propagate_max_time(const DensityMatrixGrid& grid, const PhysicalParams& p);

// Closed-form free-motion solution (U = 0) for an arbitrary initial state:
// Fourier transform over r, shift the s argument by k t / M, damp by
// exp[(Gamma M / (hbar k)) * int_{s - kt/M}^{s} (G(s'/X0) - 1) ds'],
// transform back. Throws aliasing_error when the largest shift exceeds the
// s extent, std::domain_error for t < 0.
DensityMatrixGrid free_propagate(const DensityMatrixGrid& rho0, const PhysicalParams& p,
                                 const Correlator& g, double t,
                                 const FreePropagateOptions& opts = {});

// Infinite-mass limit: rho0 * exp[(Gamma t / hbar)(G(s/X0) - 1)] elementwise.
DensityMatrixGrid decoherence_limit(const DensityMatrixGrid& rho0, const PhysicalParams& p,
                                    const Correlator& g, double t);

// Equilibrium even momentum cumulants for the Gaussian correlator, n >= 2:
// (-1)^(n-1) ((2n-1)!!/n) (M X0^2 / hbar^2 beta) (hbar/X0)^(2n).
double momentum_cumulant_formula(int n, const PhysicalParams& p);

// The value 2 M T quoted for the equilibrium second cumulant.
double equilibrium_p2(const PhysicalParams& p);

// The n -> 1 extension of the even-cumulant formula, which evaluates to M T;
// reported alongside equilibrium_p2 so measurements can adjudicate the two.
double equilibrium_p2_formula_n1(const PhysicalParams& p);

}  // namespace qkin
