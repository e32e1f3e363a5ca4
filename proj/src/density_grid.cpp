#include "qkin/density_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkin {

namespace {
bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }
}  // namespace

DensityMatrixGrid::DensityMatrixGrid(int nr, int ns, double r_extent, double s_extent)
    : nr_(nr), ns_(ns), r_extent_(r_extent), s_extent_(s_extent) {
    if (!is_pow2(nr) || !is_pow2(ns))
        throw std::invalid_argument("DensityMatrixGrid: nr and ns must be powers of two");
    if (!(r_extent > 0.0) || !(s_extent > 0.0))
        throw std::invalid_argument("DensityMatrixGrid: extents must be positive");
    values_.assign(static_cast<std::size_t>(nr) * ns, cdouble(0.0, 0.0));
}

DensityMatrixGrid DensityMatrixGrid::gaussian_pure(int nr, int ns, double r_extent,
                                                   double s_extent, double q0, double sigma_q,
                                                   double p0, double hbar, bool normalize) {
    // A pure packet saturates the uncertainty bound: sigma_p = hbar / (2 sigma_q).
    return gaussian_mixed(nr, ns, r_extent, s_extent, q0, sigma_q, p0,
                          hbar / (2.0 * sigma_q), hbar, normalize);
}

DensityMatrixGrid DensityMatrixGrid::gaussian_mixed(int nr, int ns, double r_extent,
                                                    double s_extent, double q0, double sigma_q,
                                                    double p0, double sigma_p, double hbar,
                                                    bool normalize) {
    if (!(sigma_q > 0.0) || !(sigma_p > 0.0))
        throw std::invalid_argument("gaussian state: spreads must be positive");
    if (sigma_q * sigma_p < 0.5 * hbar * (1.0 - 1e-12))
        throw std::invalid_argument("gaussian state: sigma_q * sigma_p < hbar/2 is unphysical");

    DensityMatrixGrid g(nr, ns, r_extent, s_extent);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma_q * sigma_q);
    for (int ir = 0; ir < nr; ++ir) {
        const double r = g.r_at(ir) - q0;
        const double er = std::exp(-0.5 * r * r / (sigma_q * sigma_q));
        for (int is = 0; is < ns; ++is) {
            const double s = g.s_at(is);
            const double es = std::exp(-0.5 * sigma_p * sigma_p * s * s / (hbar * hbar));
            const double phase = p0 * s / hbar;
            g.at(ir, is) = norm * er * es * cdouble(std::cos(phase), std::sin(phase));
        }
    }
    if (normalize) {
        const double tr = g.trace().real();
        if (!(tr > 0.0)) throw std::runtime_error("gaussian state: trace underflowed on grid");
        g.scale(1.0 / tr);
    }
    return g;
}

cdouble DensityMatrixGrid::trace() const {
    cdouble sum(0.0, 0.0);
    const int is0 = s_zero_index();
    for (int ir = 0; ir < nr_; ++ir) sum += at(ir, is0);
    return sum * dr();
}

double DensityMatrixGrid::hermiticity_defect() const {
    double worst = 0.0;
    for (int ir = 0; ir < nr_; ++ir) {
        for (int is = 0; is < ns_; ++is) {
            const int ims = (ns_ - is) % ns_;  // index of -s modulo the periodic domain
            const double d = std::abs(at(ir, ims) - std::conj(at(ir, is)));
            if (d > worst) worst = d;
        }
    }
    return worst;
}

double DensityMatrixGrid::min_diagonal() const {
    double worst = at(0, s_zero_index()).real();
    for (int ir = 1; ir < nr_; ++ir) worst = std::min(worst, at(ir, s_zero_index()).real());
    return worst;
}

std::vector<double> DensityMatrixGrid::diagonal() const {
    std::vector<double> d(nr_);
    for (int ir = 0; ir < nr_; ++ir) d[ir] = at(ir, s_zero_index()).real();
    return d;
}

std::vector<cdouble> DensityMatrixGrid::char_function() const {
    std::vector<cdouble> chi(ns_, cdouble(0.0, 0.0));
    for (int ir = 0; ir < nr_; ++ir)
        for (int is = 0; is < ns_; ++is) chi[is] += at(ir, is);
    for (auto& c : chi) c *= dr();
    return chi;
}

double DensityMatrixGrid::offdiagonal_mass() const {
    double sum = 0.0;
    const int is0 = s_zero_index();
    for (int ir = 0; ir < nr_; ++ir)
        for (int is = 0; is < ns_; ++is)
            if (is != is0) sum += std::norm(at(ir, is));
    return sum * dr() * ds();
}

double DensityMatrixGrid::l2_norm() const {
    double sum = 0.0;
    for (const auto& v : values_) sum += std::norm(v);
    return std::sqrt(sum * dr() * ds());
}

void DensityMatrixGrid::scale(double factor) {
    for (auto& v : values_) v *= factor;
}

double linf_distance(const DensityMatrixGrid& a, const DensityMatrixGrid& b) {
    if (a.nr() != b.nr() || a.ns() != b.ns())
        throw std::invalid_argument("linf_distance: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

}  // namespace qkin
