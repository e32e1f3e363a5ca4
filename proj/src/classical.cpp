#include "qkin/classical.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qkin/detail/parallel.hpp"
#include "qkin/rng.hpp"

namespace qkin {

namespace {
std::atomic<int> g_worker_threads{1};
}

void set_worker_threads(int n) { g_worker_threads.store(std::max(1, n)); }
int worker_threads() { return g_worker_threads.load(); }

ClassicalCoefficients classical_coefficients(const PhysicalParams& p) {
    ClassicalCoefficients c;
    const double x0 = p.correlation_length;
    c.gamma = p.beta() * p.spreading_width * p.hbar / (2.0 * p.mass * x0 * x0);
    c.d_qq = 2.0 * x0 * x0 / (p.beta() * p.beta() * p.spreading_width * p.hbar);
    c.d_pp = p.mass * c.gamma * p.temperature;
    return c;
}

LangevinEnsemble langevin_init(int n_walkers, std::uint64_t seed, double q_mean,
                               double q_sigma, double p_mean, double p_sigma) {
    if (n_walkers < 1) throw std::invalid_argument("langevin_init: n_walkers >= 1");
    LangevinEnsemble e;
    e.seed = seed;
    e.q.resize(n_walkers);
    e.p.resize(n_walkers);
    const CounterRng rng(seed);
    for (int w = 0; w < n_walkers; ++w) {
        const auto [z1, z2] = rng.normal_pair(w, 0);  // step id 0 is the init draw
        e.q[w] = q_mean + q_sigma * z1;
        e.p[w] = p_mean + p_sigma * z2;
    }
    e.step_index = 1;
    return e;
}

void langevin_step(LangevinEnsemble& ens, const ClassicalCoefficients& c,
                   const Potential& u, const PhysicalParams& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("langevin_step: dt must be > 0");
    if (dt * c.gamma >= 0.1)
        throw std::invalid_argument(
            "langevin_step: dt * gamma >= 0.1 is unstable; use dt <= " +
            std::to_string(0.05 / c.gamma));

    const CounterRng rng(ens.seed);
    const double noise = std::sqrt(2.0 * c.d_pp * dt);
    const int n = ens.n_walkers();
    detail::parallel_chunks(0, n, [&](int lo, int hi) {
        for (int w = lo; w < hi; ++w) {
            const double q = ens.q[w];
            const double pw = ens.p[w];
            ens.q[w] = q + pw / p.mass * dt;
            ens.p[w] = pw + (-u.deriv(q) - c.gamma * pw) * dt +
                       noise * rng.normal(w, ens.step_index);
        }
    });
    ens.step_index += 1;
    ens.time += dt;
}

EnsembleMoments ensemble_moments(const LangevinEnsemble& ens) {
    const int n = ens.n_walkers();
    EnsembleMoments m{};
    m.time = ens.time;

    auto cumulants = [n](const std::vector<double>& x, double& mean, double& var,
                         double& k3, double& k4) {
        double s = 0.0;
        for (double v : x) s += v;
        mean = s / n;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double v : x) {
            const double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        var = m2;
        k3 = m3;
        k4 = m4 - 3.0 * m2 * m2;
    };
    cumulants(ens.q, m.q_mean, m.q_var, m.q_kappa3, m.q_kappa4);
    cumulants(ens.p, m.p_mean, m.p_var, m.p_kappa3, m.p_kappa4);
    return m;
}

}  // namespace qkin
