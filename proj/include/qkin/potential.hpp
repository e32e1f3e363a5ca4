#pragma once

#include <string>
#include <vector>

#include "qkin/detail/spline.hpp"

namespace qkin {

enum class PotentialKind {
    Free,
    Linear,            // U = F q
    Harmonic,          // U = k q^2 / 2
    ParabolicBarrier,  // U = -k q^2 / 2
    DoubleWell,        // U = b (q^2 - a^2)^2 / 4
    Tabulated,
};

// External potential U(Q) acting on the subsystem coordinate.
class Potential {
  public:
    static Potential free();
    static Potential linear(double slope);
    static Potential harmonic(double stiffness);
    static Potential parabolic_barrier(double curvature);
    static Potential double_well(double a, double b);
    static Potential tabulated(std::vector<double> q, std::vector<double> u);

    PotentialKind kind() const { return kind_; }

    double eval(double q) const;
    double deriv(double q) const;  // dU/dq, used by the Langevin force

    std::string name() const;

  private:
    explicit Potential(PotentialKind k) : kind_(k) {}

    PotentialKind kind_;
    double p0_ = 0.0, p1_ = 0.0;
    detail::CubicSpline table_;
};

}  // namespace qkin
