#pragma once

#include <stdexcept>
#include <string>

namespace qkin {

// Parameters of the subsystem-plus-bath model, in a self-consistent unit
// system chosen by the user (natural units, hbar-value explicit).
struct PhysicalParams {
    double mass;                // M
    double hbar;                // quantum of action
    double temperature;         // T of the bath
    double spreading_width;     // coupling intensity Gamma
    double correlation_length;  // X0, displacement that decorrelates the bath

    PhysicalParams(double mass_, double hbar_, double temperature_,
                   double spreading_width_, double correlation_length_)
        : mass(mass_),
          hbar(hbar_),
          temperature(temperature_),
          spreading_width(spreading_width_),
          correlation_length(correlation_length_) {
        auto check = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("PhysicalParams: ") + name +
                                            " must be strictly positive");
        };
        check(mass, "mass");
        check(hbar, "hbar");
        check(temperature, "temperature");
        check(correlation_length, "correlation_length");
        // Gamma = 0 is the decoupled (unitary) limit and stays representable.
        if (spreading_width < 0.0)
            throw std::invalid_argument("PhysicalParams: spreading_width must be >= 0");
    }

    // beta is derived, never stored, so beta * T == 1 holds to machine precision.
    double beta() const { return 1.0 / temperature; }
};

}  // namespace qkin
