#include "qkin/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qkin/detail/quadrature.hpp"
#include "qkin/errors.hpp"
#include "qkin/fft.hpp"

namespace qkin {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double double_factorial_odd(int n) {
    // (2n - 1)!!
    double v = 1.0;
    for (int k = 2 * n - 1; k >= 3; k -= 2) v *= k;
    return v;
}

double cumulant_formula_value(int n, const PhysicalParams& p) {
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^(n-1)
    const double x0 = p.correlation_length;
    const double scale = p.mass * x0 * x0 / (p.hbar * p.hbar * p.beta());
    return sign * (double_factorial_odd(n) / n) * scale * std::pow(p.hbar / x0, 2 * n);
}

}  // namespace

namespace detail {

// Integral of (G(s'/X0) - 1) ds' over [lo, hi], Gauss-Legendre panels with
// width tracking the correlator scale X0. The range is split at the origin
// so kinked families (levy with small alpha) keep full accuracy.
double correlator_deficit_integral(const Correlator& g, double x0, double lo, double hi,
                                   const GaussLegendreRule& rule) {
    if (lo == hi) return 0.0;
    double sign = 1.0;
    if (lo > hi) {
        std::swap(lo, hi);
        sign = -1.0;
    }
    double breaks[3];
    int nb = 0;
    breaks[nb++] = lo;
    if (0.0 > lo && 0.0 < hi) breaks[nb++] = 0.0;
    breaks[nb++] = hi;

    const auto f = [&](double s) { return g.eval(s / x0) - 1.0; };
    double total = 0.0;
    for (int b = 0; b + 1 < nb; ++b) {
        const double a = breaks[b], c = breaks[b + 1];
        const int panels =
            std::clamp(static_cast<int>(std::ceil((c - a) / (0.5 * x0))), 1, 512);
        total += panel_integrate(f, a, c, panels, rule);
    }
    return sign * total;
}

}  // namespace detail

double free_propagate_max_time(const DensityMatrixGrid& grid, const PhysicalParams& p) {
    const double k_max = std::numbers::pi * p.hbar / grid.dr();
    return grid.s_extent() * p.mass / k_max;
}

DensityMatrixGrid free_propagate(const DensityMatrixGrid& rho0, const PhysicalParams& p,
                                 const Correlator& g, double t,
                                 const FreePropagateOptions& opts) {
    if (t < 0.0) throw std::domain_error("free_propagate: t must be >= 0");
    DensityMatrixGrid out = rho0;
    out.time_stamp = rho0.time_stamp + t;
    if (t == 0.0) return out;

    const int nr = rho0.nr(), ns = rho0.ns();
    const double lr = rho0.r_extent(), ls = rho0.s_extent();
    const double ds = rho0.ds();
    const double x0 = p.correlation_length;

    const double k_max = std::numbers::pi * p.hbar / rho0.dr();
    if (k_max * t / p.mass > ls)
        throw aliasing_error(
            "free_propagate: s-shift k t / M exceeds the s extent; enlarge s_extent or keep "
            "t <= " +
            std::to_string(free_propagate_max_time(rho0, p)));

    FftWorkspace fft(nr, ns);
    cdouble* data = out.data();

    // rho0(r, s) -> rho~(k, s), raw DFT over the r index. Every factor applied
    // below is diagonal in k, so grid-origin phases cancel against the final
    // inverse transform.
    fft.forward_cols(data);

    auto shift_of = [&](int m) {
        const double k = two_pi * p.hbar * freq_index(m, nr) / lr;
        return k * t / p.mass;
    };

    // Shift the s argument per momentum column: rho~(k, s - k t / M).
    if (opts.interp == ShiftInterp::Fourier) {
        fft.forward_rows(data);
        for (int m = 0; m < nr; ++m) {
            const double shift = shift_of(m);
            if (shift == 0.0) continue;
            cdouble* prow = data + static_cast<std::size_t>(m) * ns;
            for (int n = 0; n < ns; ++n) {
                const double ks = two_pi * freq_index(n, ns) / ls;
                const double arg = -ks * shift;
                prow[n] *= cdouble(std::cos(arg), std::sin(arg));
            }
        }
        fft.inverse_rows(data);
    } else {
        std::vector<cdouble> row(ns);
        for (int m = 0; m < nr; ++m) {
            const double shift = shift_of(m);
            if (shift == 0.0) continue;
            cdouble* prow = data + static_cast<std::size_t>(m) * ns;
            std::copy(prow, prow + ns, row.begin());
            for (int i = 0; i < ns; ++i) {
                const double pos = i - shift / ds;
                const double fl = std::floor(pos);
                const double w = pos - fl;
                const int base = static_cast<int>(fl);
                auto wrap = [&](int idx) {
                    int v = idx % ns;
                    return v < 0 ? v + ns : v;
                };
                // Cubic Lagrange on the four neighboring samples.
                const cdouble f0 = row[wrap(base - 1)], f1 = row[wrap(base)],
                              f2 = row[wrap(base + 1)], f3 = row[wrap(base + 2)];
                const double w0 = -w * (w - 1.0) * (w - 2.0) / 6.0;
                const double w1 = (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0;
                const double w2 = -(w + 1.0) * w * (w - 2.0) / 2.0;
                const double w3 = (w + 1.0) * w * (w - 1.0) / 6.0;
                prow[i] = w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3;
            }
        }
    }

    // Dissipative damping factor per (k, s).
    const auto rule = detail::gauss_legendre(12);
    const double k_zero = opts.k_zero_factor * p.hbar / ds;
    const double gamma_rate = p.spreading_width / p.hbar;
    if (p.spreading_width != 0.0) {
        for (int m = 0; m < nr; ++m) {
            const double k = two_pi * p.hbar * freq_index(m, nr) / lr;
            const double shift = k * t / p.mass;
            cdouble* prow = data + static_cast<std::size_t>(m) * ns;
            if (std::abs(k) < k_zero) {
                // Analytic k -> 0 limit: the integration window shrinks as k.
                for (int i = 0; i < ns; ++i) {
                    const double s = rho0.s_at(i);
                    prow[i] *= std::exp(gamma_rate * t * (g.eval(s / x0) - 1.0));
                }
            } else {
                const double pref = p.spreading_width * p.mass / (p.hbar * k);
                for (int i = 0; i < ns; ++i) {
                    const double s = rho0.s_at(i);
                    const double integral =
                        detail::correlator_deficit_integral(g, x0, s - shift, s, rule);
                    prow[i] *= std::exp(pref * integral);
                }
            }
        }
    }

    fft.inverse_cols(data);
    return out;
}

DensityMatrixGrid decoherence_limit(const DensityMatrixGrid& rho0, const PhysicalParams& p,
                                    const Correlator& g, double t) {
    if (t < 0.0) throw std::domain_error("decoherence_limit: t must be >= 0");
    DensityMatrixGrid out = rho0;
    out.time_stamp = rho0.time_stamp + t;
    const double rate = p.spreading_width * t / p.hbar;
    for (int is = 0; is < out.ns(); ++is) {
        const double factor =
            std::exp(rate * (g.eval(out.s_at(is) / p.correlation_length) - 1.0));
        for (int ir = 0; ir < out.nr(); ++ir) out.at(ir, is) *= factor;
    }
    return out;
}

double momentum_cumulant_formula(int n, const PhysicalParams& p) {
    if (n < 2) throw std::domain_error("momentum_cumulant_formula: stated for n >= 2 only");
    return cumulant_formula_value(n, p);
}

double equilibrium_p2(const PhysicalParams& p) { return 2.0 * p.mass * p.temperature; }

double equilibrium_p2_formula_n1(const PhysicalParams& p) {
    return cumulant_formula_value(1, p);
}

}  // namespace qkin
