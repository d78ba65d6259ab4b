#pragma once

#include <cstdint>
#include <string>

#include "leafstab/vehicle.hpp"

// Self-contained closed-form-versus-numeric cross-check suite. Every line of
// the report carries the measured error and the tolerance it was held to, so
// two runs with the same seed produce byte-identical text.

namespace leafstab {

struct VerifyResult {
    bool ok = false;
    std::string report;
};

// Runs all desk-scale checks (multipliers, first-order residual, projected
// Hessian, minor identities, inequality equivalence with bisection,
// Christoffel slots, metric pullback) at the given parameters with draws
// from the seed.
VerifyResult run_verify(const VehicleParams& params, std::uint64_t seed);

}  // namespace leafstab
