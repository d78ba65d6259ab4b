#include "leafstab/stability.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace leafstab {

namespace {

// Stacked coordinate differentials of the constraints, one row each.
MatX differential_rows(const std::vector<ScalarField>& fields,
                       const ChartPoint& p, const FdSteps& fd) {
    MatX rows(static_cast<int>(fields.size()), 7);
    for (int i = 0; i < rows.rows(); ++i) {
        rows.row(i) = chart_partials(fields[i], p, fd).transpose();
    }
    return rows;
}

}  // namespace

MatX gramian(const std::vector<ScalarField>& g_list,
             const std::vector<ScalarField>& f_list, const ChartPoint& p,
             const FdSteps& fd) {
    if (g_list.empty() || f_list.empty()) {
        throw Error("gramian: empty field list");
    }
    const Mat7 g_inv = induced_metric(p).g_inv;
    const MatX dg = differential_rows(g_list, p, fd);
    const MatX df = differential_rows(f_list, p, fd);
    // <grad u, grad w> = du . g^{-1} . dw
    return df * g_inv * dg.transpose();
}

MultiplierVector lagrange_multipliers(const ConstraintSet& cs,
                                      const ChartPoint& p,
                                      double regularity_tol,
                                      const FdSteps& fd) {
    if (cs.constraints.empty()) {
        throw Error("lagrange_multipliers: no constraints");
    }
    const Mat7 g_inv = induced_metric(p).g_inv;
    const MatX dF = differential_rows(cs.constraints, p, fd);

    // Regularity through the gradient matrix (rows grad F_s).
    const MatX grads = dF * g_inv;
    Eigen::JacobiSVD<MatX> svd(grads);
    if (svd.singularValues().minCoeff() <= regularity_tol) {
        throw RankDeficient(
            "lagrange_multipliers: constraint gradients are numerically "
            "dependent (smallest singular value " +
            std::to_string(svd.singularValues().minCoeff()) + ")");
    }

    const MatX Sigma = dF * g_inv * dF.transpose();
    const Vec7 dG = chart_partials(cs.objective, p, fd);
    const VecX b = dF * g_inv * dG;

    MultiplierVector out;
    out.gram_det = Sigma.determinant();
    const VecX sigma = Sigma.ldlt().solve(b);
    out.sigma.assign(sigma.data(), sigma.data() + sigma.size());
    return out;
}

MultiplierVector lagrange_multipliers_by_determinants(const ConstraintSet& cs,
                                                      const ChartPoint& p,
                                                      double det_tol,
                                                      const FdSteps& fd) {
    if (cs.constraints.empty()) {
        throw Error("lagrange_multipliers: no constraints");
    }
    const Mat7 g_inv = induced_metric(p).g_inv;
    const MatX dF = differential_rows(cs.constraints, p, fd);
    const Vec7 dG = chart_partials(cs.objective, p, fd);

    const MatX Sigma = dF * g_inv * dF.transpose();
    const VecX b = dF * g_inv * dG;

    const double denom = Sigma.determinant();
    if (std::abs(denom) < det_tol) {
        throw RankDeficient(
            "lagrange_multipliers: Gram determinant " +
            std::to_string(denom) + " below tolerance");
    }

    MultiplierVector out;
    out.gram_det = denom;
    out.sigma.resize(cs.constraints.size());
    for (int s = 0; s < Sigma.cols(); ++s) {
        MatX numerator = Sigma;
        numerator.col(s) = b;
        out.sigma[static_cast<size_t>(s)] = numerator.determinant() / denom;
    }
    return out;
}

double first_order_residual(const ConstraintSet& cs, const ChartPoint& p,
                            const FdSteps& fd) {
    const MetricAt metric = induced_metric(p);
    Vec7 residual_form = chart_partials(cs.objective, p, fd);
    if (!cs.constraints.empty()) {
        const MultiplierVector mult = lagrange_multipliers(cs, p, 1e-8, fd);
        for (size_t s = 0; s < cs.constraints.size(); ++s) {
            residual_form -=
                mult.sigma[s] * chart_partials(cs.constraints[s], p, fd);
        }
    }
    // |grad r|_g with grad r = g^{-1} dr collapses to dr . g^{-1} . dr.
    const double norm2 = residual_form.dot(metric.g_inv * residual_form);
    return std::sqrt(std::max(0.0, norm2));
}

std::vector<Vec7> tangent_basis(const std::vector<ScalarField>& constraints,
                                const ChartPoint& p, const FdSteps& fd) {
    const MetricAt metric = induced_metric(p);

    MatX kernel;
    if (constraints.empty()) {
        kernel = Mat7::Identity();
    } else {
        const MatX dF = differential_rows(constraints, p, fd);
        Eigen::JacobiSVD<MatX> svd(dF, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        int rank = 0;
        const double cutoff =
            1e-12 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
        for (int i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) ++rank;
        }
        kernel = svd.matrixV().rightCols(7 - rank);
    }

    // Gram-Schmidt in the induced inner product.
    std::vector<Vec7> basis;
    for (int j = 0; j < kernel.cols(); ++j) {
        Vec7 v = kernel.col(j);
        for (const Vec7& u : basis) {
            v -= u.dot(metric.g * v) * u;
        }
        const double n = std::sqrt(v.dot(metric.g * v));
        if (n < 1e-12) {
            throw RankDeficient("tangent_basis: degenerate kernel vector");
        }
        basis.push_back(v / n);
    }
    return basis;
}

ProjectedHessian projected_hessian(const ConstraintSet& cs,
                                   const ChartPoint& p,
                                   const std::vector<Vec7>& basis,
                                   double tangency_tol, const FdSteps& fd) {
    ProjectedHessian out;
    if (basis.empty()) {
        out.basis = tangent_basis(cs.constraints, p, fd);
    } else {
        const size_t expected = 7 - cs.constraints.size();
        if (basis.size() != expected) {
            throw BasisNotTangent("projected_hessian: basis size " +
                                  std::to_string(basis.size()) +
                                  ", expected " + std::to_string(expected));
        }
        for (const ScalarField& f : cs.constraints) {
            const Vec7 df = chart_partials(f, p, fd);
            for (const Vec7& v : basis) {
                if (std::abs(df.dot(v)) > tangency_tol) {
                    throw BasisNotTangent(
                        "projected_hessian: vector leaves the tangent space "
                        "of constraint " +
                        f.name);
                }
            }
        }
        out.basis = basis;
    }

    Mat7 corrected = riemannian_hessian(cs.objective, p, fd);
    if (!cs.constraints.empty()) {
        const MultiplierVector mult = lagrange_multipliers(cs, p, 1e-8, fd);
        for (size_t s = 0; s < cs.constraints.size(); ++s) {
            corrected -=
                mult.sigma[s] * riemannian_hessian(cs.constraints[s], p, fd);
        }
    }

    const int n = static_cast<int>(out.basis.size());
    out.matrix.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out.matrix(i, j) = out.basis[static_cast<size_t>(i)]
                                   .dot(corrected *
                                        out.basis[static_cast<size_t>(j)]);
        }
    }
    out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
    return out;
}

DefinitenessReport definiteness(const MatX& m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error("definiteness: matrix must be square and nonempty");
    }
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9) {
        throw Error("definiteness: asymmetry " + std::to_string(asym) +
                    " exceeds 1e-9");
    }
    const MatX s = 0.5 * (m + m.transpose());
    const int n = static_cast<int>(s.rows());

    // Leading principal minors as running pivot products of an unpivoted LU.
    DefinitenessReport report;
    report.leading_minors.resize(static_cast<size_t>(n));
    {
        MatX lu = s;
        double product = 1.0;
        for (int k = 0; k < n; ++k) {
            const double pivot = lu(k, k);
            product *= pivot;
            report.leading_minors[static_cast<size_t>(k)] = product;
            if (pivot != 0.0) {
                for (int i = k + 1; i < n; ++i) {
                    const double factor = lu(i, k) / pivot;
                    lu.row(i).tail(n - k) -=
                        factor * lu.row(k).tail(n - k);
                }
            } else {
                // Zero pivot: remaining minors stay at zero product; the
                // eigenvalue branch decides whether that is ambiguous.
                for (int j = k + 1; j < n; ++j) {
                    report.leading_minors[static_cast<size_t>(j)] = 0.0;
                }
                break;
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<MatX> eig(s);
    report.min_eigenvalue = eig.eigenvalues().minCoeff();

    bool minors_positive = true;
    for (double d : report.leading_minors) {
        minors_positive = minors_positive && d > tol;
    }
    const bool eig_positive = report.min_eigenvalue > tol;

    if (minors_positive != eig_positive) {
        throw NumericalAmbiguity(
            "definiteness: Sylvester minors and eigenvalues disagree "
            "(min eigenvalue " +
            std::to_string(report.min_eigenvalue) + ")");
    }
    report.positive_definite = minors_positive;
    return report;
}

}  // namespace leafstab
