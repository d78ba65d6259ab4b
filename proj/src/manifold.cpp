#include "leafstab/manifold.hpp"

#include <cmath>

namespace leafstab {

namespace {

void require_valid(const ChartPoint& p, const char* where) {
    if (!p.valid()) {
        throw InvalidChartPoint(std::string(where) +
                                ": direction triple (x4,x5,x6) vanishes");
    }
}

}  // namespace

AmbientState embed(const ChartPoint& p) {
    require_valid(p, "embed");
    AmbientState z;
    const Vec7& x = p.x;
    z.Pi = Vec3(x(0), x(1), x(2));
    const Vec3 triple(x(3), x(4), x(5));
    if (p.chart == ChartId::GammaChart) {
        z.P = x(6) * triple;
        z.Gamma = triple;
    } else {
        z.P = triple;
        z.Gamma = x(6) * triple;
    }
    return z;
}

ChartPoint transition_gamma_to_p(const ChartPoint& p) {
    require_valid(p, "transition");
    if (p.x(6) == 0.0) {
        throw TransitionUndefined("transition: x7 == 0, scale not invertible");
    }
    ChartPoint q;
    q.chart =
        p.chart == ChartId::GammaChart ? ChartId::PChart : ChartId::GammaChart;
    q.x(0) = p.x(0);
    q.x(1) = p.x(1);
    q.x(2) = p.x(2);
    q.x(3) = p.x(3) * p.x(6);
    q.x(4) = p.x(4) * p.x(6);
    q.x(5) = p.x(5) * p.x(6);
    q.x(6) = 1.0 / p.x(6);
    return q;
}

MetricAt induced_metric(const ChartPoint& p, double det_tol) {
    require_valid(p, "induced_metric");
    const Vec7& x = p.x;
    const double t = x(6) * x(6) + 1.0;
    const double rho2 = x(3) * x(3) + x(4) * x(4) + x(5) * x(5);

    MetricAt m;
    m.g.setZero();
    m.g(0, 0) = m.g(1, 1) = m.g(2, 2) = 1.0;
    for (int i = 3; i < 6; ++i) {
        m.g(i, i) = t;
        m.g(i, 6) = m.g(6, i) = x(i) * x(6);
    }
    m.g(6, 6) = rho2;

    m.det = t * t * rho2;
    if (m.det < det_tol) {
        throw SingularMetric("induced_metric: determinant " +
                             std::to_string(m.det) + " below tolerance");
    }

    // The bordered block inverts in closed form through its Schur
    // complement rho2 / t; cheaper and better conditioned than a generic
    // solve, and the tests compare it against Eigen's inverse anyway.
    m.g_inv.setZero();
    m.g_inv(0, 0) = m.g_inv(1, 1) = m.g_inv(2, 2) = 1.0;
    for (int i = 3; i < 6; ++i) {
        for (int j = 3; j < 6; ++j) {
            double v = x(6) * x(6) * x(i) * x(j) / (t * rho2);
            if (i == j) v += 1.0 / t;
            m.g_inv(i, j) = v;
        }
        m.g_inv(i, 6) = m.g_inv(6, i) = -x(6) * x(i) / rho2;
    }
    m.g_inv(6, 6) = t / rho2;
    return m;
}

ChristoffelAt christoffel(const ChartPoint& p, const FdSteps& fd) {
    require_valid(p, "christoffel");
    const double h = fd.metric;

    // dg[l](i,j) = d g_ij / d x_l by central differences.
    std::array<Mat7, 7> dg;
    for (int l = 0; l < 7; ++l) {
        ChartPoint pp = p;
        ChartPoint pm = p;
        pp.x(l) += h;
        pm.x(l) -= h;
        dg[l] = (induced_metric(pp).g - induced_metric(pm).g) / (2.0 * h);
    }

    const Mat7 g_inv = induced_metric(p).g_inv;
    ChristoffelAt c;
    for (int k = 0; k < 7; ++k) {
        c.Gamma[k].setZero();
        for (int i = 0; i < 7; ++i) {
            for (int j = i; j < 7; ++j) {
                double s = 0.0;
                for (int l = 0; l < 7; ++l) {
                    s += g_inv(k, l) *
                         (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                }
                c.Gamma[k](i, j) = 0.5 * s;
                c.Gamma[k](j, i) = c.Gamma[k](i, j);
            }
        }
    }
    return c;
}

Vec7 chart_partials(const ScalarField& f, const ChartPoint& p,
                    const FdSteps& fd) {
    if (f.partials) {
        return f.partials(p);
    }
    const double h = fd.first;
    Vec7 d;
    for (int i = 0; i < 7; ++i) {
        ChartPoint pp = p;
        ChartPoint pm = p;
        pp.x(i) += h;
        pm.x(i) -= h;
        d(i) = (f.value(pp) - f.value(pm)) / (2.0 * h);
    }
    return d;
}

Mat7 chart_second_partials(const ScalarField& f, const ChartPoint& p,
                           const FdSteps& fd) {
    if (f.second_partials) {
        Mat7 m = f.second_partials(p);
        return 0.5 * (m + m.transpose());
    }
    const double h = fd.second;
    Mat7 m;
    const double f0 = f.value(p);
    for (int i = 0; i < 7; ++i) {
        ChartPoint pp = p;
        ChartPoint pm = p;
        pp.x(i) += h;
        pm.x(i) -= h;
        m(i, i) = (f.value(pp) - 2.0 * f0 + f.value(pm)) / (h * h);
        for (int j = i + 1; j < 7; ++j) {
            ChartPoint a = p, b = p, c = p, d = p;
            a.x(i) += h;
            a.x(j) += h;
            b.x(i) += h;
            b.x(j) -= h;
            c.x(i) -= h;
            c.x(j) += h;
            d.x(i) -= h;
            d.x(j) -= h;
            m(i, j) = (f.value(a) - f.value(b) - f.value(c) + f.value(d)) /
                      (4.0 * h * h);
            m(j, i) = m(i, j);
        }
    }
    return m;
}

Vec7 riemannian_gradient(const ScalarField& f, const ChartPoint& p,
                         const FdSteps& fd) {
    return induced_metric(p).g_inv * chart_partials(f, p, fd);
}

Mat7 riemannian_hessian(const ScalarField& f, const ChartPoint& p,
                        const FdSteps& fd) {
    const Vec7 df = chart_partials(f, p, fd);
    const ChristoffelAt c = christoffel(p, fd);
    Mat7 h = chart_second_partials(f, p, fd);
    for (int k = 0; k < 7; ++k) {
        h -= c.Gamma[k] * df(k);
    }
    return h;
}

}  // namespace leafstab
