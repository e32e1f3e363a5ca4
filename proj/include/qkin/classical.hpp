#pragma once

#include <cstdint>
#include <vector>

#include "qkin/physical_params.hpp"
#include "qkin/potential.hpp"

namespace qkin {

// hbar -> 0 limit coefficients of the kinetic equation with a correlator
// behaving as 1 - x^2/2 at small arguments.
struct ClassicalCoefficients {
    double gamma;  // friction, beta Gamma hbar / (2 M X0^2)
    double d_qq;   // spatial diffusion, 2 X0^2 / (beta^2 Gamma hbar)
    double d_pp;   // momentum diffusion closure M gamma T (Maxwellian stationary state)
};

ClassicalCoefficients classical_coefficients(const PhysicalParams& p);

// Independent walkers evolving under dQ = (P/M) dt,
// dP = (-U'(Q) - gamma P) dt + sqrt(2 d_pp dt) xi.
struct LangevinEnsemble {
    std::vector<double> q;
    std::vector<double> p;
    std::uint64_t seed = 0;
    double time = 0.0;
    std::uint64_t step_index = 0;  // consumed noise ids; advanced every step

    int n_walkers() const { return static_cast<int>(q.size()); }
};

// Gaussian initial conditions drawn from the counter rng stream of `seed`.
LangevinEnsemble langevin_init(int n_walkers, std::uint64_t seed, double q_mean,
                               double q_sigma, double p_mean, double p_sigma);

// One Euler-Maruyama step. Throws std::invalid_argument when
// dt * gamma >= 0.1 (stability guard) with a suggested dt in the message.
void langevin_step(LangevinEnsemble& ens, const ClassicalCoefficients& c,
                   const Potential& u, const PhysicalParams& p, double dt);

struct EnsembleMoments {
    double time;
    double q_mean, q_var, q_kappa3, q_kappa4;
    double p_mean, p_var, p_kappa3, p_kappa4;
};

EnsembleMoments ensemble_moments(const LangevinEnsemble& ens);

}  // namespace qkin
