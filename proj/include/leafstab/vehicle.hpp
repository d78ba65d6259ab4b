#pragma once

#include <vector>

#include "leafstab/manifold.hpp"
#include "leafstab/types.hpp"

// Rigid body in an ideal fluid with a low center of buoyancy: added-mass
// dynamics on the nine-dimensional impulse space, plus the chart restrictions
// used by the stability pipeline.

namespace leafstab {

struct VehicleParams {
    double m1 = 3.0;  // [kg] effective mass, body axis 1
    double m2 = 3.0;  // [kg] effective mass, body axis 2
    double m3 = 1.0;  // [kg] effective mass, body axis 3
    double I1 = 2.0;  // [kg m^2] effective inertia, axis 1
    double I2 = 2.0;  // [kg m^2] effective inertia, axis 2
    double I3 = 1.0;  // [kg m^2] effective inertia, axis 3
    double m = 1.0;   // [kg] buoyancy-corrected mass
    double l = 0.5;   // [m] offset of the buoyancy center along axis 3
    double g = 10.0;  // [m/s^2] gravity

    double mgl() const { return m * g * l; }
    bool symmetric() const { return m1 == m2 && I1 == I2; }

    // Throws InvalidParams naming the first violated condition.
    void validate() const;
};

// Entries of the inverse of the 6x6 mass-inertia block matrix. The couplings
// b1, b2 are negative for positive offset l.
struct DerivedCoeffs {
    double a1 = 0.0, a2 = 0.0;
    double b1 = 0.0, b2 = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double inv_I3 = 0.0, inv_m3 = 0.0;
    bool is_symmetric = false;

    // Symmetric-case aliases. Throw AsymmetricParams when m1 != m2 or
    // I1 != I2, since a single coefficient is not defined then.
    double a() const;
    double b() const;
    double c() const;
};

// A relative equilibrium along the third axis: spin Pi_e (nonzero) and
// translation impulse P_e.
struct EquilibriumSpec {
    double Pi_e = 1.0;
    double P_e = 0.0;
};

DerivedCoeffs derived_coeffs(const VehicleParams& p);

// Body angular velocity and linear velocity for a state.
void velocities(const AmbientState& z, const VehicleParams& p, Vec3& Omega,
                Vec3& v);

double hamiltonian(const AmbientState& z, const VehicleParams& p);

// Analytic gradient of the Hamiltonian, as a flat 9-vector
// (dH/dPi, dH/dP, dH/dGamma).
Vec9 hamiltonian_gradient(const AmbientState& z, const VehicleParams& p);

// The five conserved-quantity candidates (C1..C5):
//   <P,Gamma>, |P|^2/2, |Gamma|^2/2, <Pi,P>, <Pi,Gamma>.
std::array<double, 5> invariants_eval(const AmbientState& z);

// Structure matrix of the bracket at z (9x9, antisymmetric).
Mat9 poisson_tensor(const AmbientState& z);

// Right-hand side of the equations of motion in cross-product form. Agrees
// with poisson_tensor(z) * hamiltonian_gradient(z) to machine precision; the
// tests pin that down.
Vec9 vector_field(const AmbientState& z, const VehicleParams& p);

// Equilibrium state (0,0,Pi_e, 0,0,P_e, 0,0,1). Throws ZeroSpin when
// Pi_e == 0.
AmbientState equilibrium_state(const EquilibriumSpec& e);

// Same point in gamma-chart coordinates: (0,0,Pi_e, 0,0,1, P_e).
ChartPoint equilibrium_chart_point(const EquilibriumSpec& e);

// Chart restrictions of the conserved quantities and of the augmented
// objective G = H + lambda*K, where K is the spin about the third axis.
// Requires the symmetric case; throws AsymmetricParams otherwise since K and
// G are not conserved without the symmetry.
struct ChartFieldSet {
    ScalarField H;
    ScalarField C1, C2, C3, C4, C5;
    ScalarField K;
    ScalarField G;  // H + lambda * K
    double lambda = 0.0;
};

ChartFieldSet chart_fields(const VehicleParams& p, double lambda);

}  // namespace leafstab
