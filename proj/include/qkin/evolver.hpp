#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkin/correlator.hpp"
#include "qkin/density_grid.hpp"
#include "qkin/physical_params.hpp"
#include "qkin/potential.hpp"

namespace qkin {

enum class Scheme { StrangSplit, Rk4Spectral };

struct SolverOptions {
    double dt = 1e-3;
    int n_steps = 1;
    int snapshot_stride = 1;
    Scheme scheme = Scheme::StrangSplit;
    bool dealias = false;

    // Early-stop threshold on |trace - 1|; hermiticity is logged against
    // herm_tol but never stops a run.
    double trace_tol = 1e-6;
    double herm_tol = 1e-6;

    // Infinite-mass configuration: both terms carry 1/M and are switched
    // off together to recover the pure decoherence equation.
    bool disable_kinetic = false;
    bool disable_friction = false;

    // Absorbing taper near the r boundaries for long free runs. Absorption
    // removes mass, so the trace early-stop is skipped when enabled.
    bool absorbing_mask = false;
    double absorb_width_frac = 0.1;

    // Record the minimum eigenvalue of a coarse-grained rho at snapshots.
    bool positivity_monitor = false;
    int positivity_dim = 32;

    void validate() const;
};

enum class RunStatus { Completed, EarlyStopTrace, AbortedNonFinite };

struct ConservationRecord {
    int step = 0;
    double time = 0.0;
    double trace_defect = 0.0;       // |trace - 1|
    double hermiticity_defect = 0.0;
    double min_diagonal = 0.0;
    double min_eigenvalue = 0.0;     // NaN when not monitored at this step
};

struct Trajectory {
    std::vector<DensityMatrixGrid> snapshots;
    std::vector<ConservationRecord> conservation_log;
    RunStatus status = RunStatus::Completed;
    std::string message;
    std::string provenance;  // config echo, filled by the runner

    const DensityMatrixGrid& final_state() const { return snapshots.back(); }
};

// Numerical check that the (X,Y) and (r,s) forms of the generator agree on
// random smooth test functions; returns the worst relative deviation and
// throws transform_mismatch_error if it exceeds 1e-8. evolve() runs this
// before its first step.
double verify_coordinate_transform(const PhysicalParams& p, const Correlator& g,
                                   const Potential& u, std::uint64_t seed = 0x51ab,
                                   int n_functions = 4, int n_points = 64);

// Advance rho0 through n_steps of dt. Strang splitting applies the mixed
// kinetic term spectrally, the local potential/decoherence factors exactly,
// and the friction advection by characteristics at the splitting order.
Trajectory evolve(const DensityMatrixGrid& rho0, const PhysicalParams& p,
                  const Correlator& g, const Potential& u, const SolverOptions& opts);

// Relative L2 residual of i hbar d_t rho - L[rho] for a candidate solution
// given at >= 3 closely spaced times (centered derivative at the middle
// slice). The kinetic/friction switches select the generator variant.
double residual_norm(const std::vector<DensityMatrixGrid>& slices, const PhysicalParams& p,
                     const Correlator& g, const Potential& u, bool include_kinetic = true,
                     bool include_friction = true);

// Apply the (r,s) generator L (as used by residual_norm) to a grid.
DensityMatrixGrid apply_generator(const DensityMatrixGrid& rho, const PhysicalParams& p,
                                  const Correlator& g, const Potential& u,
                                  bool include_kinetic = true, bool include_friction = true);

// Minimum eigenvalue of rho coarse-grained to an m x m position-basis
// matrix (positivity diagnostic).
double coarse_min_eigenvalue(const DensityMatrixGrid& rho, int m);

}  // namespace qkin
