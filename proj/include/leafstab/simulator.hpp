#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "leafstab/vehicle.hpp"

// Adaptive integration of the impulse dynamics plus the empirical side of the
// stability story: conservation audits and perturbation probes around the
// spinning equilibria.

namespace leafstab {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double dt_init = 1e-3;   // [s]
    double dt_min = 1e-12;   // [s]
    double dt_max = 1.0;     // [s]
    double t_final = 100.0;  // [s]
    std::int64_t max_steps = 2'000'000;

    void validate() const;  // throws ValidationError
};

struct Trajectory {
    std::vector<double> t;
    std::vector<AmbientState> z;
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
};

enum class ProbeMode { Leaf, Submanifold, FullSpace };

const char* to_string(ProbeMode mode);

struct ProbeConfig {
    ProbeMode mode = ProbeMode::FullSpace;
    double epsilon = 1e-3;
    int samples = 20;
    std::uint64_t seed = 0;
    double escape_radius = 0.1;
};

struct SampleResult {
    double max_deviation = 0.0;
    bool escaped = false;
    double t_end = 0.0;
};

struct ProbeReport {
    ProbeMode mode = ProbeMode::FullSpace;
    double epsilon = 0.0;
    int samples = 0;
    double max_deviation = 0.0;  // max over samples
    bool escaped = false;        // any sample escaped
    double escape_radius = 0.0;
    std::vector<SampleResult> per_sample;
};

struct ConservationReport {
    double dH = 0.0;
    double dC1 = 0.0, dC2 = 0.0, dC3 = 0.0;
    std::optional<double> dK;  // only meaningful in the symmetric case
    double dC4 = 0.0, dC5 = 0.0;
    // When the start lies off the invariant set, C4/C5 drift is expected and
    // the two values are informational only.
    bool c4_c5_informational = false;
};

// Observer called after every accepted step; return false to stop the
// integration early.
using StepObserver = std::function<bool(double t, const AmbientState& z)>;

// Embedded 5(4) pair with adaptive steps; local error controlled against
// abs_tol + rel_tol * |z| componentwise. Throws StepSizeUnderflow when the
// controller pushes the step below dt_min and MaxStepsExceeded past
// max_steps.
Trajectory integrate(const AmbientState& z0, const VehicleParams& p,
                     const IntegratorConfig& cfg);

// Same stepper without storing the trajectory; the observer sees every
// accepted step (including the initial state at t=0).
void integrate_observed(const AmbientState& z0, const VehicleParams& p,
                        const IntegratorConfig& cfg,
                        const StepObserver& observer);

ConservationReport conservation_report(const Trajectory& traj,
                                       const VehicleParams& p);

// Max over the trajectory of |P x Gamma|, the distance-like defect from the
// invariant set. Conserved along exact solutions (it is a function of the
// Casimirs), so it doubles as an integrator audit.
double invariance_report(const Trajectory& traj);

// Deterministic perturbation probe around the equilibrium. Leaf and
// Submanifold modes need the symmetric case (they go through the chart
// machinery); FullSpace works for any parameters.
ProbeReport stability_probe(const EquilibriumSpec& e, const VehicleParams& p,
                            const ProbeConfig& probe,
                            const IntegratorConfig& integ);

// CSV with header t,Pi1,Pi2,Pi3,P1,P2,P3,G1,G2,G3, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// CSV with header sample,max_deviation,escaped,t_end.
void write_probe_csv(std::ostream& os, const ProbeReport& report);

// Reproducible scalar stream: raw 64-bit Mersenne Twister output mapped to
// doubles by fixed arithmetic, so sequences do not depend on the standard
// library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    double uniform();   // [0, 1)
    double gaussian();  // standard normal, Box-Muller

private:
    std::mt19937_64 state_;
    std::optional<double> spare_;
};

}  // namespace leafstab
