#include "leafstab/classifier.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace leafstab {

namespace {

void require_symmetric(const VehicleParams& p, const char* where) {
    if (!p.symmetric()) {
        throw AsymmetricParams(std::string(where) +
                               ": needs m1 == m2 and I1 == I2");
    }
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RegionLabel label_from_margins(double mgl, double rhs_full, double rhs_leaf,
                               double boundary_tol) {
    if (rhs_full < mgl - boundary_tol) {
        return RegionLabel::StableFull;
    }
    if (rhs_leaf < mgl - boundary_tol && mgl <= rhs_full + boundary_tol) {
        return RegionLabel::StableOnSubmanifold;
    }
    if (mgl < rhs_leaf - boundary_tol) {
        return RegionLabel::Unstable;
    }
    return RegionLabel::Boundary;
}

}  // namespace

const char* to_string(RegionLabel label) {
    switch (label) {
        case RegionLabel::StableFull:
            return "StableFull";
        case RegionLabel::StableOnSubmanifold:
            return "StableOnSubmanifold";
        case RegionLabel::Unstable:
            return "Unstable";
        case RegionLabel::Boundary:
            return "Boundary";
    }
    return "?";
}

ThetaQuadratic theta_quadratic(const EquilibriumSpec& e,
                               const VehicleParams& p) {
    require_symmetric(p, "theta_quadratic");
    const double a = derived_coeffs(p).a();
    const double m1 = p.m1, m3 = p.m3, I1 = p.I1, I3 = p.I3;
    const double ml2 = p.m * p.m * p.l * p.l;
    const double mgl = p.mgl();
    const double Pi_e = e.Pi_e, P_e = e.P_e;

    // Term-by-term transcription of the closed form; the grouping mirrors
    // the source so a drifted factor stays findable. The numeric-minor guard
    // is the authority if these ever disagree.
    const double pref = a * a / (m1 * m3 * I3 * I3);
    const double lam2 = m3 * I3 * I3 * (m1 * I1 - ml2);
    const double lam1 = 2.0 * Pi_e * m3 * I3 * m1 * I1 -
                        m1 * Pi_e * m3 * I3 * I3 -
                        2.0 * Pi_e * m3 * I3 * ml2;
    const double lam0 = Pi_e * Pi_e * m3 * m1 * I1 +
                        m1 * P_e * P_e * I3 * I3 - m1 * I3 * I3 * mgl * m3 -
                        m1 * I3 * Pi_e * Pi_e * m3 - Pi_e * Pi_e * m3 * ml2 -
                        P_e * P_e * m3 * I3 * I3;

    ThetaQuadratic q;
    q.q2 = -pref * lam2;
    q.q1 = -pref * lam1;
    q.q0 = -pref * lam0;
    return q;
}

LambdaStar lambda_star(const ThetaQuadratic& q) {
    if (!(q.q2 < 0.0)) {
        throw Error("lambda_star: quadratic is not concave");
    }
    LambdaStar s;
    s.lambda = -q.q1 / (2.0 * q.q2);
    s.theta_max = q.eval(s.lambda);
    s.exists_positive = s.theta_max > 0.0;
    return s;
}

InequalityReport stability_inequality(const EquilibriumSpec& e,
                                      const VehicleParams& p) {
    require_symmetric(p, "stability_inequality");
    const double a = derived_coeffs(p).a();
    InequalityReport r;
    r.lhs = p.mgl();
    r.rhs = (1.0 / p.m3 - 1.0 / p.m1) * e.P_e * e.P_e -
            0.25 * a * e.Pi_e * e.Pi_e;
    r.margin = r.lhs - r.rhs;
    return r;
}

std::array<double, 3> closed_form_multipliers(const EquilibriumSpec& e,
                                              const VehicleParams& p,
                                              double lambda) {
    require_symmetric(p, "closed_form_multipliers");
    const double I3 = p.I3, m3 = p.m3;
    const double Pi_e = e.Pi_e, P_e = e.P_e;
    return {P_e / m3,
            -(I3 * P_e * P_e + m3 * Pi_e * Pi_e +
              lambda * I3 * m3 * Pi_e + p.mgl() * I3 * m3) /
                (I3 * m3),
            (lambda * I3 + Pi_e) / I3};
}

Eigen::Matrix4d closed_form_hessian(const EquilibriumSpec& e,
                                    const VehicleParams& p, double lambda) {
    require_symmetric(p, "closed_form_hessian");
    const double m1 = p.m1, m3 = p.m3, I1 = p.I1, I3 = p.I3;
    const double ml = p.m * p.l;
    const double ml2 = ml * ml;
    const double mgl = p.mgl();
    const double Pi_e = e.Pi_e, P_e = e.P_e;
    const double denom = m1 * I1 - ml2;

    const double h11 = m1 / denom;
    const double h13 = -(lambda * I3 + Pi_e) / I3;
    const double h14 = ml * P_e / denom;
    const double h33 =
        (P_e * P_e * I1 * m3 * I3 + ml2 * P_e * P_e * I3 -
         m1 * I1 * P_e * P_e * I3 - I3 * p.g * p.m * p.m * p.m * p.l * p.l * p.l * m3 -
         Pi_e * m3 * lambda * I3 * ml2 + Pi_e * m3 * lambda * I3 * m1 * I1 +
         mgl * m3 * m1 * I1 * I3 - Pi_e * Pi_e * m3 * ml2 +
         Pi_e * Pi_e * m3 * m1 * I1) /
        (denom * I3 * m3);

    Eigen::Matrix4d h;
    h << h11, 0.0, h13, h14,
         0.0, h11, -h14, h13,
         h13, -h14, h33, 0.0,
         h14, h13, 0.0, h33;
    return h;
}

Eigen::Matrix4d numeric_projected_hessian(const EquilibriumSpec& e,
                                          const VehicleParams& p,
                                          double lambda) {
    require_symmetric(p, "numeric_projected_hessian");
    const ChartFieldSet fields = chart_fields(p, lambda);
    ConstraintSet cs;
    cs.constraints = {fields.C1, fields.C3, fields.C5};
    cs.objective = fields.G;

    std::vector<Vec7> w(4, Vec7::Zero());
    w[0](0) = 1.0;
    w[1](1) = 1.0;
    w[2](3) = 1.0;
    w[3](4) = 1.0;

    const ProjectedHessian ph =
        projected_hessian(cs, equilibrium_chart_point(e), w);
    return ph.matrix;
}

void validate_theta_transcription(const EquilibriumSpec& e,
                                  const VehicleParams& p, double rel_tol) {
    const ThetaQuadratic q = theta_quadratic(e, p);
    // A fixed lambda spread is enough to pin a quadratic; no randomness so
    // the guard is reproducible.
    const double lambdas[3] = {-1.5, 0.0, 1.0};
    for (double lambda : lambdas) {
        const Eigen::Matrix4d h = numeric_projected_hessian(e, p, lambda);
        const double minor3 = h.topLeftCorner<3, 3>().determinant();
        const double transcribed = q.eval(lambda);
        const double err = std::abs(transcribed - minor3) /
                           std::max(1.0, std::abs(minor3));
        if (err > rel_tol) {
            throw NumericalAmbiguity(
                "theta transcription check FAILED: closed-form theta3(" +
                std::to_string(lambda) + ") = " + std::to_string(transcribed) +
                " but numeric minor = " + std::to_string(minor3) +
                "; refusing to classify with a drifted formula");
        }
    }
}

Classification classify(const EquilibriumSpec& e, const VehicleParams& p,
                        double boundary_tol) {
    require_symmetric(p, "classify");
    if (e.Pi_e == 0.0) {
        throw ZeroSpin("classify: Pi_e must be nonzero");
    }
    validate_theta_transcription(e, p);

    const double a = derived_coeffs(p).a();
    const double mgl = p.mgl();
    const double rhs_full = (1.0 / p.m3 - 1.0 / p.m1) * e.P_e * e.P_e;
    const double rhs_leaf = rhs_full - 0.25 * a * e.Pi_e * e.Pi_e;

    Classification c;
    c.margin_full = mgl - rhs_full;
    c.margin_leaf = mgl - rhs_leaf;
    c.lambda_star = lambda_star(theta_quadratic(e, p));
    const auto sigma = closed_form_multipliers(e, p, c.lambda_star.lambda);
    c.sigma = {sigma[0], sigma[1], sigma[2]};
    c.label = label_from_margins(mgl, rhs_full, rhs_leaf, boundary_tol);
    return c;
}

std::vector<ScanRow> scan(const ScanGrid& grid, const VehicleParams& p,
                          double boundary_tol) {
    require_symmetric(p, "scan");
    if (!(grid.Pi_step > 0.0) || !(grid.P_step > 0.0)) {
        throw ValidationError("scan: grid steps must be positive");
    }

    const auto count = [](double lo, double hi, double step) {
        if (hi < lo) return 0L;
        return static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1L;
    };
    const long n_pi = count(grid.Pi_min, grid.Pi_max, grid.Pi_step);
    const long n_p = count(grid.P_min, grid.P_max, grid.P_step);

    const double a = derived_coeffs(p).a();
    const double mgl = p.mgl();

    std::vector<ScanRow> rows;
    bool guard_done = false;
    for (long i = 0; i < n_pi; ++i) {
        const double Pi_e = grid.Pi_min + static_cast<double>(i) * grid.Pi_step;
        if (std::abs(Pi_e) < 1e-15) {
            continue;  // no equilibrium without spin
        }
        for (long j = 0; j < n_p; ++j) {
            const double P_e = grid.P_min + static_cast<double>(j) * grid.P_step;
            if (!guard_done) {
                validate_theta_transcription(EquilibriumSpec{Pi_e, P_e}, p);
                guard_done = true;
            }
            const double rhs_full = (1.0 / p.m3 - 1.0 / p.m1) * P_e * P_e;
            const double rhs_leaf = rhs_full - 0.25 * a * Pi_e * Pi_e;

            ScanRow row;
            row.Pi_e = Pi_e;
            row.P_e = P_e;
            row.margin_full = mgl - rhs_full;
            row.margin_leaf = mgl - rhs_leaf;
            row.label =
                label_from_margins(mgl, rhs_full, rhs_leaf, boundary_tol);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << "Pi_e,P_e,margin_full,margin_leaf,label\n";
    for (const ScanRow& r : rows) {
        os << fmt17(r.Pi_e) << ',' << fmt17(r.P_e) << ','
           << fmt17(r.margin_full) << ',' << fmt17(r.margin_leaf) << ','
           << to_string(r.label) << '\n';
    }
}

}  // namespace leafstab
