#include "qkin/potential.hpp"

#include <stdexcept>

namespace qkin {

Potential Potential::free() { return Potential(PotentialKind::Free); }

Potential Potential::linear(double slope) {
    Potential p(PotentialKind::Linear);
    p.p0_ = slope;
    return p;
}

Potential Potential::harmonic(double stiffness) {
    if (!(stiffness > 0.0))
        throw std::invalid_argument("Potential::harmonic: stiffness must be positive");
    Potential p(PotentialKind::Harmonic);
    p.p0_ = stiffness;
    return p;
}

Potential Potential::parabolic_barrier(double curvature) {
    if (!(curvature > 0.0))
        throw std::invalid_argument("Potential::parabolic_barrier: curvature must be positive");
    Potential p(PotentialKind::ParabolicBarrier);
    p.p0_ = curvature;
    return p;
}

Potential Potential::double_well(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("Potential::double_well: a and b must be positive");
    Potential p(PotentialKind::DoubleWell);
    p.p0_ = a;
    p.p1_ = b;
    return p;
}

Potential Potential::tabulated(std::vector<double> q, std::vector<double> u) {
    Potential p(PotentialKind::Tabulated);
    p.table_ = detail::CubicSpline(std::move(q), std::move(u));
    return p;
}

double Potential::eval(double q) const {
    switch (kind_) {
        case PotentialKind::Free: return 0.0;
        case PotentialKind::Linear: return p0_ * q;
        case PotentialKind::Harmonic: return 0.5 * p0_ * q * q;
        case PotentialKind::ParabolicBarrier: return -0.5 * p0_ * q * q;
        case PotentialKind::DoubleWell: {
            const double d = q * q - p0_ * p0_;
            return 0.25 * p1_ * d * d;
        }
        case PotentialKind::Tabulated: return table_.eval(q);
    }
    return 0.0;
}

double Potential::deriv(double q) const {
    switch (kind_) {
        case PotentialKind::Free: return 0.0;
        case PotentialKind::Linear: return p0_;
        case PotentialKind::Harmonic: return p0_ * q;
        case PotentialKind::ParabolicBarrier: return -p0_ * q;
        case PotentialKind::DoubleWell: return p1_ * q * (q * q - p0_ * p0_);
        case PotentialKind::Tabulated: return table_.deriv(q);
    }
    return 0.0;
}

std::string Potential::name() const {
    switch (kind_) {
        case PotentialKind::Free: return "free";
        case PotentialKind::Linear: return "linear";
        case PotentialKind::Harmonic: return "harmonic";
        case PotentialKind::ParabolicBarrier: return "parabolic-barrier";
        case PotentialKind::DoubleWell: return "double-well";
        case PotentialKind::Tabulated: return "tabulated";
    }
    return "?";
}

}  // namespace qkin
