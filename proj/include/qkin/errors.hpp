#pragma once

#include <stdexcept>
#include <string>

namespace qkin {

// Derivative requested at a point where the correlator is not differentiable
// (levy family with alpha <= 1 at x = 0).
struct singular_derivative_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A spectral shift would wrap data around the periodic s-domain.
struct aliasing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The parametric covariance built from G is not positive semidefinite
// beyond the clip tolerance, i.e. G is not a valid covariance function.
struct invalid_correlator_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// chi(0) deviates from 1 beyond tolerance; the state is not normalized.
struct unnormalized_state_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Regression window contains a zero crossing or otherwise degenerate data.
struct ill_conditioned_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The (X,Y) -> (r,s) generator forms disagree on test functions.
struct transform_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration validation failure; message carries the field path.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qkin
