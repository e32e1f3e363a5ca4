#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

namespace {

constexpr double pi = std::numbers::pi;

// Composite Simpson on [a, b] with n (even) intervals.
template <typename F>
auto simpson(F&& f, double a, double b, int n) -> decltype(f(a)) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    auto acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * (h / 3.0);
}

}  // namespace

double finite_difference_deriv(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

cdouble free_propagator_point(const qkin::PhysicalParams& p, const qkin::Correlator& g,
                              double q0, double sigma_q, double p0, double r, double s,
                              double t) {
    const double hbar = p.hbar;
    const double x0 = p.correlation_length;

    const auto deficit = [&](double lo, double hi) {
        if (lo == hi) return 0.0;
        return simpson([&](double u) { return g.eval(u / x0) - 1.0; }, lo, hi, 400);
    };

    const auto integrand = [&](double k) -> cdouble {
        const double shift = k * t / p.mass;
        const double u = s - shift;
        // Analytic r' integral of the Gaussian packet.
        const cdouble rho0_k =
            std::exp(cdouble(-sigma_q * sigma_q * k * k / (2.0 * hbar * hbar),
                             -k * q0 / hbar)) *
            std::exp(cdouble(-u * u / (8.0 * sigma_q * sigma_q), p0 * u / hbar));
        double damp_exp;
        if (std::abs(k) < 1e-10) {
            damp_exp = p.spreading_width * t / hbar * (g.eval(s / x0) - 1.0);
        } else {
            damp_exp = p.spreading_width * p.mass / (hbar * k) * deficit(s - shift, s);
        }
        const cdouble phase = std::exp(cdouble(0.0, k * r / hbar));
        return rho0_k * std::exp(cdouble(damp_exp, 0.0)) * phase;
    };

    const double k_cut = 9.0 * hbar / sigma_q;
    const cdouble integral = simpson(integrand, -k_cut, k_cut, 6000);
    return integral / (2.0 * pi * hbar);
}

double stable_pdf(double alpha, double c, double p) {
    p = std::abs(p);
    const double u_scale = std::pow(1.0 / c, 1.0 / alpha);  // exponent ~ 1 there

    // Tail series (Bergstrom): f(p) = (1/pi) sum_k (-1)^{k+1} Gamma(k a + 1)/k!
    //   sin(k pi a / 2) c^k / p^{k a + 1}.
    if (p * u_scale > 60.0) {
        double sum = 0.0;
        for (int k = 1; k <= 4; ++k) {
            const double term = std::exp(std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0)) *
                                std::sin(0.5 * k * pi * alpha) * std::pow(c, k) /
                                std::pow(p, k * alpha + 1.0);
            sum += (k % 2 ? term : -term);
        }
        return sum / pi;
    }

    // Direct quadrature: integrate to where the envelope is ~1e-18, panelled
    // on half-periods of the cosine once oscillation matters.
    const double u_max = std::pow(42.0 / c, 1.0 / alpha);
    const auto f = [&](double u) { return std::cos(p * u) * std::exp(-c * std::pow(u, alpha)); };
    double total = 0.0;
    if (p * u_max < 4.0) {
        total = simpson(f, 0.0, u_max, 4000);
    } else {
        const double half_period = pi / p;
        double lo = 0.0;
        while (lo < u_max) {
            const double hi = std::min(lo + half_period, u_max);
            total += simpson(f, lo, hi, 16);
            lo = hi;
        }
    }
    return total / pi;
}

qkin::DensityMatrixGrid coherent_state_rho(int nr, int ns, double r_extent, double s_extent,
                                           double q0, double p0, double mass, double hbar,
                                           double k_stiff, double t) {
    const double omega = std::sqrt(k_stiff / mass);
    const double qc = q0 * std::cos(omega * t) + p0 / (mass * omega) * std::sin(omega * t);
    const double pc = p0 * std::cos(omega * t) - mass * omega * q0 * std::sin(omega * t);
    const double sigma2 = hbar / (2.0 * mass * omega);

    qkin::DensityMatrixGrid rho(nr, ns, r_extent, s_extent);
    rho.time_stamp = t;
    const double norm = 1.0 / std::sqrt(2.0 * pi * sigma2);
    for (int ir = 0; ir < nr; ++ir) {
        const double dr = rho.r_at(ir) - qc;
        for (int is = 0; is < ns; ++is) {
            const double s = rho.s_at(is);
            const double mag = norm * std::exp(-dr * dr / (2.0 * sigma2) -
                                               s * s / (8.0 * sigma2));
            const double arg = pc * s / hbar;
            rho.at(ir, is) = mag * cdouble(std::cos(arg), std::sin(arg));
        }
    }
    return rho;
}

OuMoments ou_moments(double t, double var_q0, double var_p0, double cov_qp0, double gamma,
                     double mass, double temperature) {
    OuMoments m{var_q0, var_p0, cov_qp0};
    const double d_pp = mass * gamma * temperature;
    const int n = 200000;
    const double h = t / n;
    const auto rhs = [&](const OuMoments& s) {
        OuMoments d;
        d.var_q = 2.0 * s.cov_qp / mass;
        d.cov_qp = s.var_p / mass - gamma * s.cov_qp;
        d.var_p = -2.0 * gamma * s.var_p + 2.0 * d_pp;
        return d;
    };
    for (int i = 0; i < n; ++i) {
        const auto k1 = rhs(m);
        OuMoments tmp{m.var_q + 0.5 * h * k1.var_q, m.var_p + 0.5 * h * k1.var_p,
                      m.cov_qp + 0.5 * h * k1.cov_qp};
        const auto k2 = rhs(tmp);
        tmp = {m.var_q + 0.5 * h * k2.var_q, m.var_p + 0.5 * h * k2.var_p,
               m.cov_qp + 0.5 * h * k2.cov_qp};
        const auto k3 = rhs(tmp);
        tmp = {m.var_q + h * k3.var_q, m.var_p + h * k3.var_p, m.cov_qp + h * k3.cov_qp};
        const auto k4 = rhs(tmp);
        m.var_q += h / 6.0 * (k1.var_q + 2 * k2.var_q + 2 * k3.var_q + k4.var_q);
        m.var_p += h / 6.0 * (k1.var_p + 2 * k2.var_p + 2 * k3.var_p + k4.var_p);
        m.cov_qp += h / 6.0 * (k1.cov_qp + 2 * k2.cov_qp + 2 * k3.cov_qp + k4.cov_qp);
    }
    return m;
}

}  // namespace oracles
