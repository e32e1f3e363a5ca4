#include "qkin/correlator.hpp"

#include <cmath>
#include <stdexcept>

#include "qkin/errors.hpp"

namespace qkin {

Correlator Correlator::gaussian() { return Correlator(CorrelatorFamily::Gaussian); }

Correlator Correlator::quadratic_truncated() {
    return Correlator(CorrelatorFamily::QuadraticTruncated);
}

Correlator Correlator::levy(double alpha) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::invalid_argument("Correlator::levy: alpha must lie in (0, 2]");
    return Correlator(CorrelatorFamily::Levy, alpha);
}

Correlator Correlator::levy_exponential(double alpha) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::invalid_argument("Correlator::levy_exponential: alpha must lie in (0, 2]");
    return Correlator(CorrelatorFamily::LevyExponential, alpha);
}

Correlator Correlator::tabulated(std::vector<double> x, std::vector<double> g) {
    if (x.size() < 4)
        throw std::invalid_argument("Correlator::tabulated: need at least 4 samples");
    if (x.front() != 0.0)
        throw std::invalid_argument("Correlator::tabulated: first sample must be at x = 0");
    if (g.front() != 1.0)
        throw std::invalid_argument("Correlator::tabulated: G(0) must equal 1");
    Correlator c(CorrelatorFamily::Tabulated);
    c.table_step_ = x[1] - x[0];
    c.table_ = detail::CubicSpline(std::move(x), std::move(g));
    return c;
}

double Correlator::eval(double x) const {
    switch (family_) {
        case CorrelatorFamily::Gaussian:
            return std::exp(-0.5 * x * x);
        case CorrelatorFamily::QuadraticTruncated:
            return std::max(1.0 - 0.5 * x * x, -1.0);
        case CorrelatorFamily::Levy:
            return std::max(1.0 - std::pow(std::abs(x), alpha_), -1.0);
        case CorrelatorFamily::LevyExponential:
            return std::exp(-std::pow(std::abs(x), alpha_));
        case CorrelatorFamily::Tabulated:
            return table_.eval(std::abs(x));  // mirror about 0
    }
    return 0.0;
}

double Correlator::deriv(double x) const {
    switch (family_) {
        case CorrelatorFamily::Gaussian:
            return -x * std::exp(-0.5 * x * x);
        case CorrelatorFamily::QuadraticTruncated:
            return (1.0 - 0.5 * x * x > -1.0) ? -x : 0.0;
        case CorrelatorFamily::Levy: {
            const double ax = std::abs(x);
            if (ax == 0.0) {
                if (alpha_ <= 1.0)
                    throw singular_derivative_error(
                        "levy correlator with alpha <= 1 is not differentiable at x = 0");
                return 0.0;
            }
            if (1.0 - std::pow(ax, alpha_) <= -1.0) return 0.0;  // clamped region
            const double mag = alpha_ * std::pow(ax, alpha_ - 1.0);
            return x > 0.0 ? -mag : mag;
        }
        case CorrelatorFamily::LevyExponential: {
            const double ax = std::abs(x);
            if (ax == 0.0) {
                if (alpha_ <= 1.0)
                    throw singular_derivative_error(
                        "levy correlator with alpha <= 1 is not differentiable at x = 0");
                return 0.0;
            }
            const double mag =
                alpha_ * std::pow(ax, alpha_ - 1.0) * std::exp(-std::pow(ax, alpha_));
            return x > 0.0 ? -mag : mag;
        }
        case CorrelatorFamily::Tabulated: {
            // Fourth-order centered stencil (-G(x+2h)+8G(x+h)-8G(x-h)+G(x-2h))/(12h),
            // h = half the table spacing; eval mirrors, which keeps the stencil
            // valid across the origin.
            const double h = 0.5 * table_step_;
            return (-eval(x + 2.0 * h) + 8.0 * eval(x + h) - 8.0 * eval(x - h) +
                    eval(x - 2.0 * h)) /
                   (12.0 * h);
        }
    }
    return 0.0;
}

std::string Correlator::name() const {
    switch (family_) {
        case CorrelatorFamily::Gaussian: return "gaussian";
        case CorrelatorFamily::QuadraticTruncated: return "quadratic-truncated";
        case CorrelatorFamily::Levy: return "levy(alpha=" + std::to_string(alpha_) + ")";
        case CorrelatorFamily::LevyExponential:
            return "levy-exponential(alpha=" + std::to_string(alpha_) + ")";
        case CorrelatorFamily::Tabulated: return "tabulated";
    }
    return "?";
}

}  // namespace qkin
