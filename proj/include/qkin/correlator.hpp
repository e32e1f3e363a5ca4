#pragma once

#include <string>
#include <vector>

#include "qkin/detail/spline.hpp"

namespace qkin {

enum class CorrelatorFamily {
    Gaussian,            // exp(-x^2/2)
    QuadraticTruncated,  // max(1 - x^2/2, -1)
    Levy,                // max(1 - |x|^alpha, -1), alpha in (0, 2]
    LevyExponential,     // exp(-|x|^alpha), smooth completion of the levy family
    Tabulated,           // cubic spline over samples, mirrored about 0
};

// Normalized bath correlator G(x): G(0) = 1, even, real, |G| <= 1.
// The argument is the dimensionless displacement (X - Y) / X0.
class Correlator {
  public:
    static Correlator gaussian();
    static Correlator quadratic_truncated();
    static Correlator levy(double alpha);
    static Correlator levy_exponential(double alpha);
    // Samples g_i = G(x_i) at x_i >= 0 with x_0 = 0; evaluation mirrors
    // about the origin so evenness holds exactly.
    static Correlator tabulated(std::vector<double> x, std::vector<double> g);

    CorrelatorFamily family() const { return family_; }
    double alpha() const { return alpha_; }

    // G(x). Throws std::out_of_range for tabulated queries outside range.
    double eval(double x) const;

    // dG/dx. Throws singular_derivative_error at x = 0 for the levy
    // families with alpha <= 1. Tabulated derivative is a fourth-order
    // centered difference of eval with step = half the table spacing.
    double deriv(double x) const;

    std::string name() const;

  private:
    explicit Correlator(CorrelatorFamily f, double alpha = 0.0) : family_(f), alpha_(alpha) {}

    CorrelatorFamily family_;
    double alpha_ = 0.0;
    detail::CubicSpline table_;
    double table_step_ = 0.0;
};

}  // namespace qkin
