#pragma once

#include <array>
#include <functional>
#include <string>

#include "leafstab/errors.hpp"
#include "leafstab/types.hpp"

// Chart-based geometry of the 7-dimensional invariant set where the linear
// impulse stays parallel to the gravity direction. Two overlapping charts
// cover it; the gamma chart is the canonical one and every production
// computation happens there. The p chart exists so the atlas can be tested
// for consistency on the overlap.

namespace leafstab {

enum class ChartId { GammaChart, PChart };

// A point of the invariant set in one of the two charts. Coordinates 4..6
// (0-based 3..5) form the direction triple and must not vanish; x7 scales the
// companion vector and may be zero.
struct ChartPoint {
    ChartId chart = ChartId::GammaChart;
    Vec7 x = Vec7::Zero();

    bool valid(double tol = 0.0) const {
        const double n2 = x(3) * x(3) + x(4) * x(4) + x(5) * x(5);
        return n2 > tol;
    }
};

// Metric data at a point: matrix, inverse, and the determinant used for the
// singularity guard.
struct MetricAt {
    Mat7 g = Mat7::Identity();
    Mat7 g_inv = Mat7::Identity();
    double det = 1.0;
};

// All Christoffel symbols at a point, Gamma[k](i,j) with lower symmetry in
// (i,j).
struct ChristoffelAt {
    std::array<Mat7, 7> Gamma{};
};

// A scalar function on the chart. Analytic derivative callbacks are optional
// accelerators; where they are absent, central finite differences define the
// result. When both are provided they must agree (tested), and the analytic
// path is preferred.
struct ScalarField {
    std::string name;
    std::function<double(const ChartPoint&)> value;
    std::function<Vec7(const ChartPoint&)> partials;         // optional
    std::function<Mat7(const ChartPoint&)> second_partials;  // optional
};

// Finite-difference step sizes. The defaults are load-bearing: metric steps
// feed the Christoffel symbols, the others the generic derivative fallbacks.
struct FdSteps {
    double metric = 1e-5;
    double first = 1e-6;
    double second = 1e-4;
};

// Maps chart coordinates to the ambient nine-dimensional state.
// Throws InvalidChartPoint when the direction triple vanishes.
AmbientState embed(const ChartPoint& p);

// Transition map from the gamma chart to the p chart. Defined only where
// x7 != 0; applying it twice returns the original coordinates.
ChartPoint transition_gamma_to_p(const ChartPoint& p);

// Closed-form induced metric (identical expression in both charts), checked
// against the pullback J^T J of the embedding in the tests. Throws
// SingularMetric when the determinant falls below det_tol.
MetricAt induced_metric(const ChartPoint& p, double det_tol = 1e-14);

// Christoffel symbols of the induced metric from central differences of the
// metric itself.
ChristoffelAt christoffel(const ChartPoint& p, const FdSteps& fd = FdSteps{});

// Coordinate partials of a field: analytic callback when present, otherwise
// central differences with step fd.first.
Vec7 chart_partials(const ScalarField& f, const ChartPoint& p,
                    const FdSteps& fd = FdSteps{});

// Coordinate second partials: analytic callback when present, otherwise
// central differences with step fd.second. Result is symmetrized.
Mat7 chart_second_partials(const ScalarField& f, const ChartPoint& p,
                           const FdSteps& fd = FdSteps{});

// Riemannian gradient grad f = g^{-1} df.
Vec7 riemannian_gradient(const ScalarField& f, const ChartPoint& p,
                         const FdSteps& fd = FdSteps{});

// Riemannian (covariant) Hessian:
//   Hess f_ij = d2f/dxi dxj - Gamma^k_ij df/dxk.
Mat7 riemannian_hessian(const ScalarField& f, const ChartPoint& p,
                        const FdSteps& fd = FdSteps{});

}  // namespace leafstab
