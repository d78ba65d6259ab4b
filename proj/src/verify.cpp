#include "leafstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "leafstab/classifier.hpp"
#include "leafstab/simulator.hpp"
#include "leafstab/stability.hpp"

namespace leafstab {

namespace {

double draw_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform();
}

// Spin magnitude bounded away from zero, random sign. The upper bound keeps
// the finite-difference noise floor of the numeric pipeline well below the
// tolerances used here.
double draw_spin(Rng& rng) {
    const double mag = draw_range(rng, 0.5, 3.0);
    return rng.uniform() < 0.5 ? -mag : mag;
}

// Error metric used throughout: relative where the reference is O(1) or
// larger, absolute where it crosses zero.
double mixed_err(double got, double ref) {
    return std::abs(got - ref) / (1.0 + std::abs(ref));
}

struct ReportBuilder {
    std::ostringstream out;
    bool all_ok = true;

    void line(int idx, const char* name, int n, const char* err_label,
              double err, double tol, bool ok) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%2d  %-44s n=%-4d %s=%.3e  tol=%.1e  %s\n", idx, name,
                      n, err_label, err, tol, ok ? "PASS" : "FAIL");
        out << buf;
        all_ok = all_ok && ok;
    }
};

}  // namespace

VerifyResult run_verify(const VehicleParams& p, std::uint64_t seed) {
    p.validate();
    if (!p.symmetric()) {
        throw AsymmetricParams(
            "verify: the cross-check suite needs m1 == m2 and I1 == I2");
    }

    Rng rng(seed);
    ReportBuilder rb;
    rb.out << "verification suite  seed=" << seed << "\n";

    {  // 1: multipliers, linear solve and determinant ratios vs closed form
        double worst = 0.0;
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3, 3)};
            const double lambda = draw_range(rng, -2, 2);
            const auto ref = closed_form_multipliers(e, p, lambda);
            const ChartFieldSet f = chart_fields(p, lambda);
            const ConstraintSet cs{{f.C1, f.C3, f.C5}, f.G};
            const ChartPoint xe = equilibrium_chart_point(e);
            const MultiplierVector mv = lagrange_multipliers(cs, xe);
            const MultiplierVector md =
                lagrange_multipliers_by_determinants(cs, xe);
            for (int s = 0; s < 3; ++s) {
                worst = std::max(worst, mixed_err(mv.sigma[static_cast<size_t>(s)],
                                                  ref[static_cast<size_t>(s)]));
                worst = std::max(worst, mixed_err(md.sigma[static_cast<size_t>(s)],
                                                  ref[static_cast<size_t>(s)]));
            }
        }
        rb.line(1, "multiplier solve vs closed form", n, "max_err", worst,
                1e-10, worst < 1e-10);
    }

    {  // 2: first-order condition across the equilibrium set
        double worst = 0.0;
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3, 3)};
            const double lambda = draw_range(rng, -2, 2);
            const ChartFieldSet f = chart_fields(p, lambda);
            const ConstraintSet cs{{f.C1, f.C3, f.C5}, f.G};
            worst = std::max(
                worst, first_order_residual(cs, equilibrium_chart_point(e)));
        }
        rb.line(2, "first-order residual at equilibria", n, "max_err", worst,
                1e-9, worst < 1e-9);
    }

    {  // 3: projected Hessian, numeric pipeline vs closed form, entrywise
        double worst = 0.0;
        const int n = 10;
        for (int i = 0; i < n; ++i) {
            const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3, 3)};
            const double lambda = draw_range(rng, -2, 2);
            const Eigen::Matrix4d num = numeric_projected_hessian(e, p, lambda);
            const Eigen::Matrix4d ref = closed_form_hessian(e, p, lambda);
            worst = std::max(worst, (num - ref).cwiseAbs().maxCoeff());
        }
        rb.line(3, "projected hessian vs closed form", n, "max_err", worst,
                1e-8, worst < 1e-8);
    }

    {  // 4: leading-minor chain of the closed-form matrix
        double worst = 0.0;
        int used = 0;
        const DerivedCoeffs dc = derived_coeffs(p);
        const double a = dc.a();
        for (int i = 0; i < 20; ++i) {
            const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3, 3)};
            const double lambda = draw_range(rng, -2, 2);
            const Eigen::Matrix4d h = closed_form_hessian(e, p, lambda);
            const double t1 = h(0, 0);
            const double t2 = h.topLeftCorner<2, 2>().determinant();
            const double t3 = h.topLeftCorner<3, 3>().determinant();
            const double t4 = h.determinant();
            if (std::abs(t3) <= 1e-6) {
                continue;
            }
            ++used;
            worst = std::max(worst, mixed_err(t1, a));
            worst = std::max(worst, mixed_err(t2, a * a));
            worst = std::max(worst, mixed_err(t4 * a * a, t3 * t3));
        }
        rb.line(4, "leading-minor identities", used, "max_err", worst, 1e-8,
                worst < 1e-8);
    }

    {  // 5: solvability of theta3 > 0 vs the scalar inequality, plus a
       //    bisection hunt for the threshold in the weight term
        int violations = 0;
        const int n = 500;
        for (int i = 0; i < n; ++i) {
            VehicleParams q;
            do {
                q.m1 = q.m2 = draw_range(rng, 0.5, 5.0);
                q.m3 = draw_range(rng, 0.5, 5.0);
                q.I1 = q.I2 = draw_range(rng, 0.5, 5.0);
                q.I3 = draw_range(rng, 0.5, 5.0);
                q.m = draw_range(rng, 0.5, 2.0);
                q.l = draw_range(rng, 0.0, 1.0);
                q.g = draw_range(rng, 1.0, 20.0);
            } while (q.m1 * q.I1 - q.m * q.m * q.l * q.l < 1e-3);
            const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3, 3)};
            const InequalityReport ir = stability_inequality(e, q);
            if (std::abs(ir.margin) <= 1e-9) {
                continue;
            }
            const LambdaStar ls = lambda_star(theta_quadratic(e, q));
            if (ls.exists_positive != (ir.margin > 0.0)) {
                ++violations;
            }
        }

        double bisect_err = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            VehicleParams q;
            q.m1 = q.m2 = draw_range(rng, 2.0, 5.0);
            q.m3 = draw_range(rng, 0.3, 0.8);
            q.I1 = q.I2 = draw_range(rng, 1.5, 5.0);
            q.I3 = draw_range(rng, 0.5, 3.0);
            q.m = draw_range(rng, 0.5, 1.0);
            q.l = draw_range(rng, 0.1, 0.6);
            const EquilibriumSpec e{draw_spin(rng) / 3.0,
                                    draw_range(rng, 1.5, 3.0)};
            // Threshold from the closed form, then rediscovered blind by
            // bisecting the weight term through g.
            q.g = 1.0;
            const double threshold =
                stability_inequality(e, q).lhs - stability_inequality(e, q).margin;
            auto solvable = [&](double mgl) {
                VehicleParams w = q;
                w.g = mgl / (w.m * w.l);
                return lambda_star(theta_quadratic(e, w)).exists_positive;
            };
            double lo = threshold - 0.4, hi = threshold + 0.4;
            if (solvable(lo) || !solvable(hi)) {
                bisect_err = 1.0;  // bracket failed outright
                break;
            }
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                (solvable(mid) ? hi : lo) = mid;
            }
            bisect_err = std::max(
                bisect_err, std::abs(0.5 * (lo + hi) - threshold));
        }
        const bool ok = violations == 0 && bisect_err <= 1e-6;
        char extra[160];
        std::snprintf(extra, sizeof(extra),
                      " 5  solvability vs inequality                    "
                      "n=500  violations=%d  bisect_err=%.3e  tol=1.0e-06  %s\n",
                      violations, bisect_err, ok ? "PASS" : "FAIL");
        rb.out << extra;
        rb.all_ok = rb.all_ok && ok;
    }

    {  // 6: finite-difference Christoffel symbols at equilibria
        double worst = 0.0;
        const int n = 5;
        for (int i = 0; i < n; ++i) {
            const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3, 3)};
            const ChartPoint xe = equilibrium_chart_point(e);
            const ChristoffelAt ch = christoffel(xe);
            const double s = e.P_e / (e.P_e * e.P_e + 1.0);
            for (int k = 0; k < 7; ++k) {
                for (int r = 0; r < 7; ++r) {
                    for (int c = 0; c < 7; ++c) {
                        double expected = 0.0;
                        const bool spin_slot =
                            (k == 3 && ((r == 3 && c == 6) || (r == 6 && c == 3))) ||
                            (k == 4 && ((r == 4 && c == 6) || (r == 6 && c == 4)));
                        const bool unit_slot =
                            k == 6 && ((r == 5 && c == 6) || (r == 6 && c == 5));
                        if (spin_slot) expected = s;
                        if (unit_slot) expected = 1.0;
                        worst = std::max(
                            worst,
                            std::abs(ch.Gamma[static_cast<size_t>(k)](r, c) -
                                     expected));
                    }
                }
            }
        }
        rb.line(6, "christoffel slots at equilibria", n, "max_err", worst,
                1e-6, worst < 1e-6);
    }

    {  // 7: closed-form metric vs the pullback J^T J of the embedding
        double worst = 0.0;
        const int n = 20;
        const double h = 1e-4;
        for (int i = 0; i < n; ++i) {
            ChartPoint x;
            x.chart = rng.uniform() < 0.5 ? ChartId::GammaChart : ChartId::PChart;
            do {
                for (int k = 0; k < 7; ++k) {
                    x.x(k) = draw_range(rng, -2.0, 2.0);
                }
            } while (x.x.segment<3>(3).norm() < 0.3);
            // The embedding is bilinear, so the centered difference is exact
            // up to rounding.
            Eigen::Matrix<double, 9, 7> J;
            for (int k = 0; k < 7; ++k) {
                ChartPoint xp = x, xm = x;
                xp.x(k) += h;
                xm.x(k) -= h;
                J.col(k) = (embed(xp).to_vec() - embed(xm).to_vec()) / (2 * h);
            }
            const Mat7 pullback = J.transpose() * J;
            const MetricAt metric = induced_metric(x);
            worst = std::max(worst,
                             (pullback - metric.g).cwiseAbs().maxCoeff());
        }
        rb.line(7, "metric pullback vs closed form", n, "max_err", worst,
                1e-10, worst < 1e-10);
    }

    rb.out << "overall " << (rb.all_ok ? "PASS" : "FAIL") << "\n";
    return VerifyResult{rb.all_ok, rb.out.str()};
}

}  // namespace leafstab
