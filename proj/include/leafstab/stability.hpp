#pragma once

#include <vector>

#include "leafstab/manifold.hpp"

// Constrained critical-point machinery: Gram matrices of constraint
// gradients, generalized Lagrange multipliers, tangent bases of the joint
// level set, and the projected covariant Hessian whose definiteness decides
// stability.

namespace leafstab {

struct ConstraintSet {
    std::vector<ScalarField> constraints;
    ScalarField objective;
};

struct MultiplierVector {
    std::vector<double> sigma;
    double gram_det = 0.0;  // determinant of the constraint Gram matrix
};

struct ProjectedHessian {
    std::vector<Vec7> basis;  // tangent vectors, chart components
    MatX matrix;              // (7-q) x (7-q), symmetric
};

struct DefinitenessReport {
    bool positive_definite = false;
    std::vector<double> leading_minors;
    double min_eigenvalue = 0.0;
};

// Gram matrix of gradients in the induced metric: entry (r,s) is
// <grad g_s, grad f_r>. Both lists must be nonempty.
MatX gramian(const std::vector<ScalarField>& g_list,
             const std::vector<ScalarField>& f_list, const ChartPoint& p,
             const FdSteps& fd = FdSteps{});

// Multipliers of the objective with respect to the constraints, from the
// normal system Sigma * sigma = b. Regularity is checked through the
// smallest singular value of the stacked constraint gradients
// (> regularity_tol); failure throws RankDeficient.
MultiplierVector lagrange_multipliers(const ConstraintSet& cs,
                                      const ChartPoint& p,
                                      double regularity_tol = 1e-8,
                                      const FdSteps& fd = FdSteps{});

// Same multipliers through determinant ratios of bordered Gram matrices.
// Kept as an independent cross-check of the linear solve; throws
// RankDeficient when the denominator determinant is below det_tol.
MultiplierVector lagrange_multipliers_by_determinants(
    const ConstraintSet& cs, const ChartPoint& p, double det_tol = 1e-12,
    const FdSteps& fd = FdSteps{});

// Norm (in the induced metric) of grad G - sum_s sigma_s grad F_s. A value
// below 1e-9 certifies the first-order condition at the point.
double first_order_residual(const ConstraintSet& cs, const ChartPoint& p,
                            const FdSteps& fd = FdSteps{});

// Metric-orthonormal basis of the common null space of the constraint
// differentials: SVD for the null space, Gram-Schmidt in the induced inner
// product for orthonormality. An empty constraint list yields a full
// orthonormal basis of the chart tangent space.
std::vector<Vec7> tangent_basis(const std::vector<ScalarField>& constraints,
                                const ChartPoint& p,
                                const FdSteps& fd = FdSteps{});

// Projected covariant Hessian of the multiplier-corrected objective,
//   v_i^T (Hess G - sum sigma_s Hess F_s) v_j,
// on the given tangent basis, or on the computed metric-orthonormal one when
// basis is empty. Supplied basis vectors must annihilate every constraint
// differential (|dF(v)| <= tangency_tol), else BasisNotTangent.
ProjectedHessian projected_hessian(const ConstraintSet& cs,
                                   const ChartPoint& p,
                                   const std::vector<Vec7>& basis = {},
                                   double tangency_tol = 1e-8,
                                   const FdSteps& fd = FdSteps{});

// Dual definiteness test: leading principal minors from an LU pass without
// pivoting, and the smallest eigenvalue. Both must clear tol for a positive
// verdict; when the two criteria disagree, NumericalAmbiguity is thrown.
// The input must be symmetric up to 1e-9; it is symmetrized internally.
DefinitenessReport definiteness(const MatX& m, double tol = 1e-12);

}  // namespace leafstab
