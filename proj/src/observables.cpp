#include "qkin/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qkin/detail/fd_weights.hpp"
#include "qkin/errors.hpp"
#include "qkin/fft.hpp"

namespace qkin {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// ln chi with the phase unwrapped walking outward from the center index.
std::vector<cdouble> log_unwrapped(const std::vector<cdouble>& chi, int center) {
    const int n = static_cast<int>(chi.size());
    std::vector<cdouble> out(n);
    auto unwrap_walk = [&](int from, int to, int step) {
        double prev_arg = std::arg(chi[from]);
        double offset = 0.0;
        for (int i = from; i != to + step; i += step) {
            double a = std::arg(chi[i]);
            if (i != from) {
                double d = a - prev_arg;
                while (d > std::numbers::pi) {
                    offset -= two_pi;
                    d -= two_pi;
                }
                while (d < -std::numbers::pi) {
                    offset += two_pi;
                    d += two_pi;
                }
                prev_arg = a;
            } else {
                prev_arg = a;
            }
            out[i] = cdouble(std::log(std::abs(chi[i])), a + offset);
        }
    };
    unwrap_walk(center, n - 1, +1);
    unwrap_walk(center, 0, -1);
    return out;
}

// n-th derivative at the center of a uniformly sampled function, centered
// stencil of half-width hw, spacing h * stride.
double stencil_derivative(const std::vector<cdouble>& f, int center, int n, int hw,
                          double h, int stride, bool imag_part, double* abs_sum) {
    std::vector<double> offs(2 * hw + 1);
    for (int j = -hw; j <= hw; ++j) offs[j + hw] = j * h * stride;
    const auto w = detail::fd_weights(0.0, offs, n);
    double acc = 0.0, asum = 0.0;
    for (int j = -hw; j <= hw; ++j) {
        const cdouble v = f[center + j * stride];
        const double part = imag_part ? v.imag() : v.real();
        acc += w[j + hw] * part;
        asum += std::abs(w[j + hw] * part);
    }
    if (abs_sum) *abs_sum = asum;
    return acc;
}

double norminv_upper(double q) {
    // Solve erfc(x / sqrt2) = q for x > 0 by Newton iteration.
    if (!(q > 0.0) || !(q < 1.0)) throw std::domain_error("norminv_upper: q in (0,1)");
    double x = std::sqrt(std::max(1e-12, -2.0 * std::log(q)));
    for (int it = 0; it < 60; ++it) {
        const double f = std::erfc(x / std::numbers::sqrt2) - q;
        const double fp = -std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * x * x);
        const double dx = f / fp;
        x -= dx;
        if (std::abs(dx) < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

struct LineFit {
    double slope, intercept, slope_err, intercept_err, r_squared;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ill_conditioned_error("least_squares: degenerate abscissae");
    LineFit f{};
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    const double s2 = n > 2 ? ssr / (n - 2) : 0.0;
    f.slope_err = std::sqrt(s2 / sxx);
    f.intercept_err = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

}  // namespace

WignerGrid wigner_transform(const DensityMatrixGrid& rho, const PhysicalParams& params) {
    const int nr = rho.nr(), ns = rho.ns();
    WignerGrid w;
    w.nr = nr;
    w.np = ns;
    w.r_extent = rho.r_extent();
    w.p_extent = two_pi * params.hbar / rho.ds() * 1.0;  // ns * dp
    w.w.assign(static_cast<std::size_t>(nr) * ns, 0.0);

    // Row-wise DFT over s. With s_i = -L/2 + i ds the physical kernel
    // e^{-i p s / hbar} equals the raw DFT kernel times (-1)^m, and the
    // centered momentum ordering is a half-length rotation of the bins.
    std::vector<cdouble> work(rho.data(), rho.data() + rho.size());
    FftWorkspace fft(nr, ns);
    fft.forward_rows(work.data());

    const double scale = rho.ds() / (two_pi * params.hbar);
    for (int ir = 0; ir < nr; ++ir) {
        const cdouble* row = work.data() + static_cast<std::size_t>(ir) * ns;
        for (int ip = 0; ip < ns; ++ip) {
            const int m = (ip + ns / 2) % ns;  // centered bin -> raw DFT bin
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            w.at(ir, ip) = scale * sign * row[m].real();
        }
    }
    return w;
}

std::vector<double> wigner_position_marginal(const WignerGrid& w) {
    std::vector<double> out(w.nr, 0.0);
    for (int ir = 0; ir < w.nr; ++ir) {
        double acc = 0.0;
        for (int ip = 0; ip < w.np; ++ip) acc += w.at(ir, ip);
        out[ir] = acc * w.dp();
    }
    return out;
}

std::vector<double> wigner_momentum_marginal(const WignerGrid& w) {
    std::vector<double> out(w.np, 0.0);
    for (int ir = 0; ir < w.nr; ++ir)
        for (int ip = 0; ip < w.np; ++ip) out[ip] += w.at(ir, ip);
    for (auto& v : out) v *= w.dr();
    return out;
}

MomentumMarginal momentum_marginal(const DensityMatrixGrid& rho,
                                   const PhysicalParams& params) {
    const int ns = rho.ns();
    const auto chi = rho.char_function();

    // f(p) = (1/2 pi hbar) Int ds e^{-i p s/hbar} chi(s), via a single DFT.
    std::vector<cdouble> work = chi;
    fft_1d(work, true);

    MomentumMarginal m;
    m.p.resize(ns);
    m.density.resize(ns);
    const double dp = two_pi * params.hbar / rho.s_extent();
    const double scale = rho.ds() / (two_pi * params.hbar);
    for (int ip = 0; ip < ns; ++ip) {
        const int bin = (ip + ns / 2) % ns;
        const double sign = (bin % 2 == 0) ? 1.0 : -1.0;
        m.p[ip] = (ip - ns / 2) * dp;
        m.density[ip] = scale * sign * work[bin].real();
    }
    return m;
}

std::vector<CumulantEstimate> momentum_cumulants(const DensityMatrixGrid& rho,
                                                 const PhysicalParams& params,
                                                 int max_order) {
    if (max_order < 1 || max_order > 8)
        throw std::domain_error("momentum_cumulants: max_order must be in [1, 8]");
    const auto chi = rho.char_function();
    const int center = rho.s_zero_index();
    if (std::abs(chi[center] - cdouble(1.0, 0.0)) > 1e-6)
        throw unnormalized_state_error("momentum_cumulants: chi(0) deviates from 1");

    const auto logchi = log_unwrapped(chi, center);
    const double ds = rho.ds();
    const int hw = max_order / 2 + 4;  // stencil accuracy 2(hw) + 1 - n >= 8
    if (center - 2 * hw < 0 || center + 2 * hw >= rho.ns())
        throw std::domain_error("momentum_cumulants: grid too small for stencil");

    std::vector<CumulantEstimate> out(max_order);
    for (int n = 1; n <= max_order; ++n) {
        // (-i hbar)^n d^n/ds^n ln chi at 0. The real part of the cumulant
        // pulls the real or imaginary part of the derivative depending on
        // n mod 4; compute both and rotate.
        double asum = 0.0;
        const double d_re = stencil_derivative(logchi, center, n, hw, ds, 1, false, &asum);
        double asum_im = 0.0;
        const double d_im = stencil_derivative(logchi, center, n, hw, ds, 1, true, &asum_im);
        const cdouble rot = std::pow(cdouble(0.0, -params.hbar), n);
        const cdouble kappa = rot * cdouble(d_re, d_im);

        const double d2_re = stencil_derivative(logchi, center, n, hw, ds, 2, false, nullptr);
        const double d2_im = stencil_derivative(logchi, center, n, hw, ds, 2, true, nullptr);
        const cdouble kappa2 = rot * cdouble(d2_re, d2_im);

        CumulantEstimate est;
        est.value = kappa.real();
        const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                                std::pow(params.hbar, n) * (asum + asum_im);
        est.error_bound = std::abs(kappa.real() - kappa2.real()) +
                          std::abs(kappa.imag()) + roundoff;
        out[n - 1] = est;
    }
    return out;
}

std::vector<CumulantEstimate> coordinate_cumulants(const DensityMatrixGrid& rho,
                                                   const PhysicalParams&, int max_order) {
    if (max_order < 1 || max_order > 8)
        throw std::domain_error("coordinate_cumulants: max_order must be in [1, 8]");
    const auto d = rho.diagonal();
    const double dr = rho.dr();
    double mass = 0.0;
    for (double v : d) mass += v;
    mass *= dr;
    if (std::abs(mass - 1.0) > 1e-6)
        throw unnormalized_state_error("coordinate_cumulants: diagonal mass deviates from 1");

    // Raw moments, then the standard moments-to-cumulants recursion.
    std::vector<double> mu(max_order + 1, 0.0);
    std::vector<double> mu_abs(max_order + 1, 0.0);
    mu[0] = 1.0;
    for (int n = 1; n <= max_order; ++n) {
        double acc = 0.0, aabs = 0.0;
        for (int ir = 0; ir < rho.nr(); ++ir) {
            const double term = std::pow(rho.r_at(ir), n) * d[ir] * dr;
            acc += term;
            aabs += std::abs(term);
        }
        mu[n] = acc / mass;
        mu_abs[n] = aabs / std::abs(mass);
    }

    std::vector<double> kappa(max_order + 1, 0.0);
    std::vector<CumulantEstimate> out(max_order);
    for (int n = 1; n <= max_order; ++n) {
        double c = mu[n];
        double binom = 1.0;
        for (int k = 1; k <= n - 1; ++k) {
            // binom = C(n-1, k-1)
            c -= binom * kappa[k] * mu[n - k];
            binom = binom * (n - k) / k;
        }
        kappa[n] = c;
        out[n - 1].value = c;
        out[n - 1].error_bound =
            1e3 * std::numeric_limits<double>::epsilon() * (mu_abs[n] + std::abs(c));
    }
    return out;
}

PowerLawFit fit_diffusion_exponent(const std::vector<double>& times,
                                   const std::vector<double>& values, double t_lo,
                                   double t_hi) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_diffusion_exponent: length mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0))
            throw std::domain_error("fit_diffusion_exponent: non-positive value in window");
        if (!(times[i] > 0.0))
            throw std::domain_error("fit_diffusion_exponent: non-positive time in window");
        lx.push_back(std::log(times[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 10)
        throw std::domain_error("fit_diffusion_exponent: need at least 10 points in window");

    const LineFit f = least_squares(lx, ly);
    PowerLawFit out;
    out.exponent = f.slope;
    out.exponent_err = f.slope_err;
    out.prefactor = std::exp(f.intercept);
    out.prefactor_err = out.prefactor * f.intercept_err;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.n_points = static_cast<int>(lx.size());
    out.r_squared = f.r_squared;
    return out;
}

const std::vector<double>& CumulantSeries::series(char variable, int order) const {
    const auto it = cumulants.find(CumulantKey{variable, order});
    if (it == cumulants.end())
        throw std::out_of_range("CumulantSeries: no such variable/order");
    return it->second;
}

void CumulantSeries::append(double t, const std::vector<CumulantEstimate>& q_cums,
                            const std::vector<CumulantEstimate>& p_cums) {
    times.push_back(t);
    for (std::size_t i = 0; i < q_cums.size(); ++i)
        cumulants[CumulantKey{'Q', static_cast<int>(i + 1)}].push_back(q_cums[i].value);
    for (std::size_t i = 0; i < p_cums.size(); ++i)
        cumulants[CumulantKey{'P', static_cast<int>(i + 1)}].push_back(p_cums[i].value);
}

TailIndexEstimate stable_tail_index(const MomentumMarginal& marginal,
                                    const PhysicalParams& params,
                                    const StableTailOptions& opts) {
    const auto& p = marginal.p;
    const auto& f = marginal.density;
    if (p.size() != f.size() || p.size() < 8)
        throw std::invalid_argument("stable_tail_index: bad marginal");
    const double dp = p[1] - p[0];
    double mass = 0.0;
    for (double v : f) mass += v;
    mass *= dp;
    if (std::abs(mass - 1.0) > 1e-6)
        throw unnormalized_state_error("stable_tail_index: marginal is not normalized");

    auto chi_abs = [&](double s) {
        cdouble acc(0.0, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double arg = s * p[i] / params.hbar;
            acc += f[i] * cdouble(std::cos(arg), std::sin(arg));
        }
        return std::abs(acc * dp);
    };

    // Automatic window: bracket where |chi| falls through [chi_hi, chi_lo].
    double s_lo = opts.s_lo, s_hi = opts.s_hi;
    if (s_lo <= 0.0 || s_hi <= s_lo) {
        // Characteristic scale from the grid: chi decays over s ~ hbar / p_rms.
        double p2 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) p2 += p[i] * p[i] * f[i] * dp;
        double s_probe = p2 > 0.0 ? params.hbar / std::sqrt(p2) : 1.0;
        if (!std::isfinite(s_probe) || s_probe <= 0.0) s_probe = 1.0;
        // Walk outward to find the chi_lo crossing, inward for chi_hi.
        double hi = s_probe;
        for (int it = 0; it < 200 && chi_abs(hi) > opts.chi_lo; ++it) hi *= 1.3;
        double lo = hi;
        for (int it = 0; it < 400 && chi_abs(lo) < opts.chi_hi; ++it) lo /= 1.2;
        s_lo = lo;
        s_hi = hi;
    }

    std::vector<double> lx, ly;
    const int n = std::max(opts.n_points, 8);
    for (int i = 0; i < n; ++i) {
        const double s =
            std::exp(std::log(s_lo) + (std::log(s_hi) - std::log(s_lo)) * i / (n - 1.0));
        const double a = chi_abs(s);
        if (a <= 1e-12)
            throw ill_conditioned_error("stable_tail_index: |chi| vanishes inside window");
        if (a >= 1.0 - 1e-12 || a >= opts.chi_hi || a <= opts.chi_lo) continue;
        lx.push_back(std::log(s));
        ly.push_back(std::log(-std::log(a)));
    }
    if (lx.size() < 5)
        throw ill_conditioned_error("stable_tail_index: too few usable window points");

    const LineFit fit = least_squares(lx, ly);
    TailIndexEstimate est;
    est.alpha = fit.slope;
    est.alpha_err = fit.slope_err;
    est.n_points = static_cast<int>(lx.size());
    est.s_lo = s_lo;
    est.s_hi = s_hi;
    return est;
}

std::vector<double> tail_exceedance_ratios(const std::vector<double>& x,
                                           const std::vector<double>& density, double dx,
                                           const std::vector<double>& quantiles) {
    if (x.size() != density.size())
        throw std::invalid_argument("tail_exceedance_ratios: length mismatch");
    double mass = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mass += density[i] * dx;
        mean += x[i] * density[i] * dx;
    }
    mean /= mass;
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        var += (x[i] - mean) * (x[i] - mean) * density[i] * dx;
    var /= mass;
    const double sigma = std::sqrt(var);

    std::vector<double> ratios;
    ratios.reserve(quantiles.size());
    for (double q : quantiles) {
        const double threshold = norminv_upper(q) * sigma;
        double exceed = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - mean) > threshold) exceed += density[i] * dx;
        ratios.push_back(exceed / mass / q);
    }
    return ratios;
}

}  // namespace qkin
