#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "leafstab/stability.hpp"
#include "leafstab/vehicle.hpp"

// Closed-form stability classification of the spinning equilibria in the
// symmetric case, with every transcribed formula cross-checked against the
// numeric pipeline before it is trusted.

namespace leafstab {

enum class RegionLabel { StableFull, StableOnSubmanifold, Unstable, Boundary };

const char* to_string(RegionLabel label);

// Third leading principal minor of the projected Hessian as a quadratic in
// the multiplier parameter: theta3(lambda) = q2*lambda^2 + q1*lambda + q0.
// q2 < 0 always, so a positive maximum decides everything.
struct ThetaQuadratic {
    double q2 = 0.0, q1 = 0.0, q0 = 0.0;

    double eval(double lambda) const {
        return (q2 * lambda + q1) * lambda + q0;
    }
};

struct LambdaStar {
    double lambda = 0.0;     // argmax of theta3
    double theta_max = 0.0;  // value at the maximum
    bool exists_positive = false;
};

struct InequalityReport {
    double lhs = 0.0;     // m g l
    double rhs = 0.0;     // (1/m3 - 1/m1) P_e^2 - (a/4) Pi_e^2
    double margin = 0.0;  // lhs - rhs
};

struct Classification {
    RegionLabel label = RegionLabel::Boundary;
    double margin_full = 0.0;  // against the full-space threshold
    double margin_leaf = 0.0;  // against the invariant-set threshold
    LambdaStar lambda_star;
    std::array<double, 3> sigma{};  // closed-form multipliers at lambda*
};

struct ScanGrid {
    double Pi_min = 0.5, Pi_max = 4.0, Pi_step = 0.5;
    double P_min = 0.5, P_max = 4.0, P_step = 0.5;
};

struct ScanRow {
    double Pi_e = 0.0, P_e = 0.0;
    double margin_full = 0.0, margin_leaf = 0.0;
    RegionLabel label = RegionLabel::Boundary;
};

// Coefficients of theta3(lambda), transcribed term by term from the closed
// form. classify() and scan() refuse to run until these agree with the
// numeric minor (see validate_theta_transcription).
ThetaQuadratic theta_quadratic(const EquilibriumSpec& e,
                               const VehicleParams& p);

// Vertex of the quadratic: lambda* = -q1 / (2 q2), the value there, and
// whether it is positive.
LambdaStar lambda_star(const ThetaQuadratic& q);

// The scalar inequality equivalent to "theta3(lambda) > 0 for some lambda".
InequalityReport stability_inequality(const EquilibriumSpec& e,
                                      const VehicleParams& p);

// Closed-form multipliers at the equilibrium for a given lambda.
std::array<double, 3> closed_form_multipliers(const EquilibriumSpec& e,
                                              const VehicleParams& p,
                                              double lambda);

// Closed-form 4x4 projected Hessian on the tangent basis (e1, e2, e4, e5).
Eigen::Matrix4d closed_form_hessian(const EquilibriumSpec& e,
                                    const VehicleParams& p, double lambda);

// Numeric counterpart of the same matrix, through the chart-field and
// covariant-Hessian pipeline. Exposed so the cross-checks can reach it.
Eigen::Matrix4d numeric_projected_hessian(const EquilibriumSpec& e,
                                          const VehicleParams& p,
                                          double lambda);

// Compares theta_quadratic against the third leading principal minor of the
// numeric projected Hessian at a handful of lambda values. Throws
// NumericalAmbiguity with a prominent message when the transcription is off
// by more than rel_tol; classify and scan call this before any labeling.
void validate_theta_transcription(const EquilibriumSpec& e,
                                  const VehicleParams& p,
                                  double rel_tol = 1e-7);

// Region label from the two margins, with a tolerance band mapped to
// Boundary. The right edge of the intermediate region is inclusive.
Classification classify(const EquilibriumSpec& e, const VehicleParams& p,
                        double boundary_tol = 1e-9);

// Classification over a rectangular grid. Rows with Pi_e == 0 are skipped
// (no equilibrium there).
std::vector<ScanRow> scan(const ScanGrid& grid, const VehicleParams& p,
                          double boundary_tol = 1e-9);

// CSV with header Pi_e,P_e,margin_full,margin_leaf,label and 17 significant
// digits on the numeric columns.
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

}  // namespace leafstab
