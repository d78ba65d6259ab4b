#include <doctest.h>

#include <cmath>
#include <random>

#include "leafstab/manifold.hpp"

using namespace leafstab;

namespace {

ChartPoint random_chart_point(std::mt19937_64& gen, double min_dir = 0.3) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    ChartPoint p;
    p.chart = gen() % 2 ? ChartId::PChart : ChartId::GammaChart;
    do {
        for (int i = 0; i < 7; ++i) p.x(i) = u(gen);
    } while (p.x.segment<3>(3).norm() < min_dir);
    return p;
}

// Differential of the embedding by centered differences; the map is bilinear
// so the only error left is rounding.
Eigen::Matrix<double, 9, 7> embedding_jacobian(const ChartPoint& p) {
    const double h = 1e-4;
    Eigen::Matrix<double, 9, 7> J;
    for (int k = 0; k < 7; ++k) {
        ChartPoint xp = p, xm = p;
        xp.x(k) += h;
        xm.x(k) -= h;
        J.col(k) = (embed(xp).to_vec() - embed(xm).to_vec()) / (2 * h);
    }
    return J;
}

}  // namespace

TEST_CASE("gamma chart embedding layout") {
    ChartPoint p;
    p.x << 1, 2, 3, 4, 5, 6, 7;
    const AmbientState z = embed(p);
    CHECK(z.Pi(0) == 1);
    CHECK(z.Pi(1) == 2);
    CHECK(z.Pi(2) == 3);
    CHECK(z.P(0) == 28);  // direction scaled by the companion coordinate
    CHECK(z.P(1) == 35);
    CHECK(z.P(2) == 42);
    CHECK(z.Gamma(0) == 4);
    CHECK(z.Gamma(1) == 5);
    CHECK(z.Gamma(2) == 6);
    CHECK(z.P.cross(z.Gamma).norm() == 0.0);
}

TEST_CASE("p chart embedding mirrors the roles") {
    ChartPoint p;
    p.chart = ChartId::PChart;
    p.x << 1, 2, 3, 4, 5, 6, 7;
    const AmbientState z = embed(p);
    CHECK(z.P(0) == 4);
    CHECK(z.P(1) == 5);
    CHECK(z.P(2) == 6);
    CHECK(z.Gamma(0) == 28);
    CHECK(z.Gamma(1) == 35);
    CHECK(z.Gamma(2) == 42);
}

TEST_CASE("embedding rejects a vanishing direction triple") {
    ChartPoint p;
    p.x << 1, 2, 3, 0, 0, 0, 7;
    CHECK_THROWS_AS((void)embed(p), InvalidChartPoint);
}

TEST_CASE("chart transition is an involution over the overlap") {
    std::mt19937_64 gen(201);
    for (int trial = 0; trial < 20; ++trial) {
        ChartPoint p = random_chart_point(gen);
        p.chart = ChartId::GammaChart;
        if (std::abs(p.x(6)) < 0.05) p.x(6) = 0.5;
        const ChartPoint q = transition_gamma_to_p(p);
        CHECK(q.chart == ChartId::PChart);
        // both coordinates name the same ambient point
        CHECK((embed(q).to_vec() - embed(p).to_vec()).cwiseAbs().maxCoeff() <
              1e-13);
        const ChartPoint back = transition_gamma_to_p(q);
        CHECK(back.chart == ChartId::GammaChart);
        CHECK((back.x - p.x).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("chart transition is undefined at vanishing companion coordinate") {
    ChartPoint p;
    p.x << 0, 0, 1, 0, 0, 1, 0;
    CHECK_THROWS_AS((void)transition_gamma_to_p(p), TransitionUndefined);
}

TEST_CASE("metric blocks at a spinning equilibrium point") {
    ChartPoint p;
    p.x << 0, 0, 1, 0, 0, 1, 2;  // spin 1, companion coordinate 2
    const MetricAt m = induced_metric(p);
    CHECK(m.g.topLeftCorner<3, 3>().isIdentity(1e-15));
    CHECK(m.g(3, 3) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(m.g(4, 4) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(m.g(5, 5) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(m.g(5, 6) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.g(6, 5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.g(6, 6) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.g(3, 6) == 0.0);
    CHECK(m.g(4, 6) == 0.0);
    CHECK(m.det == doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("metric inverse and determinant close under the closed forms") {
    std::mt19937_64 gen(202);
    for (int trial = 0; trial < 20; ++trial) {
        const ChartPoint p = random_chart_point(gen);
        const MetricAt m = induced_metric(p);
        CHECK((m.g * m.g_inv - Mat7::Identity()).cwiseAbs().maxCoeff() <
              1e-13);
        const double rho2 = p.x.segment<3>(3).squaredNorm();
        const double t = p.x(6) * p.x(6) + 1.0;
        CHECK(m.det == doctest::Approx(t * t * rho2).epsilon(1e-13));
        // numeric inverse as an independent reference
        CHECK((m.g_inv - m.g.inverse()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("metric matches the pullback of the embedding") {
    std::mt19937_64 gen(203);
    for (int trial = 0; trial < 20; ++trial) {
        const ChartPoint p = random_chart_point(gen);
        const Eigen::Matrix<double, 9, 7> J = embedding_jacobian(p);
        const Mat7 pullback = J.transpose() * J;
        CHECK((pullback - induced_metric(p).g).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("singular metric guard") {
    ChartPoint p;
    p.x << 0, 0, 1, 1e-8, 0, 0, 0;  // direction triple nearly vanishing
    CHECK_THROWS_AS((void)induced_metric(p), SingularMetric);
}

TEST_CASE("christoffel symbols at a spinning equilibrium point") {
    ChartPoint p;
    p.x << 0, 0, 1, 0, 0, 1, 2;
    const ChristoffelAt ch = christoffel(p);
    const double s = 2.0 / 5.0;  // x7 / (x7^2 + 1)
    double worst_off = 0.0;
    for (int k = 0; k < 7; ++k) {
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                const double v = ch.Gamma[static_cast<size_t>(k)](i, j);
                const bool spin =
                    (k == 3 && ((i == 3 && j == 6) || (i == 6 && j == 3))) ||
                    (k == 4 && ((i == 4 && j == 6) || (i == 6 && j == 4)));
                const bool unit =
                    k == 6 && ((i == 5 && j == 6) || (i == 6 && j == 5));
                if (spin) {
                    CHECK(std::abs(v - s) < 1e-9);
                } else if (unit) {
                    CHECK(std::abs(v - 1.0) < 1e-9);
                } else {
                    worst_off = std::max(worst_off, std::abs(v));
                }
            }
        }
    }
    CHECK(worst_off < 1e-9);
}

TEST_CASE("christoffel symbols are symmetric in the lower indices") {
    std::mt19937_64 gen(204);
    const ChartPoint p = random_chart_point(gen, 0.6);
    const ChristoffelAt ch = christoffel(p);
    for (int k = 0; k < 7; ++k) {
        const Mat7& G = ch.Gamma[static_cast<size_t>(k)];
        CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("derivative fallbacks against a polynomial field") {
    ScalarField f;
    f.name = "poly";
    f.value = [](const ChartPoint& p) {
        return p.x(0) * p.x(0) * p.x(3) + 2.0 * p.x(6) * p.x(1) - p.x(5);
    };
    ChartPoint p;
    p.x << 1.2, -0.7, 0.3, 0.9, 0.1, -1.1, 0.4;

    const Vec7 d = chart_partials(f, p);
    Vec7 expected;
    expected << 2 * 1.2 * 0.9, 2 * 0.4, 0, 1.2 * 1.2, 0, -1, 2 * (-0.7);
    CHECK((d - expected).cwiseAbs().maxCoeff() < 1e-9);

    const Mat7 h = chart_second_partials(f, p);
    Mat7 hexp = Mat7::Zero();
    hexp(0, 0) = 2 * 0.9;
    hexp(0, 3) = hexp(3, 0) = 2 * 1.2;
    hexp(1, 6) = hexp(6, 1) = 2.0;
    CHECK((h - hexp).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic callbacks take precedence over differencing") {
    ScalarField f;
    f.value = [](const ChartPoint& p) { return p.x(0); };
    f.partials = [](const ChartPoint&) {
        Vec7 d = Vec7::Zero();
        d(0) = 42.0;  // deliberately not the derivative of value
        return d;
    };
    ChartPoint p;
    p.x << 0, 0, 0, 1, 0, 0, 0;
    CHECK(chart_partials(f, p)(0) == 42.0);
}

TEST_CASE("riemannian gradient solves g grad = df") {
    std::mt19937_64 gen(205);
    ScalarField f;
    f.value = [](const ChartPoint& p) {
        return p.x(2) * p.x(6) + p.x(4) * p.x(4);
    };
    for (int trial = 0; trial < 5; ++trial) {
        const ChartPoint p = random_chart_point(gen, 0.5);
        const Vec7 grad = riemannian_gradient(f, p);
        const Vec7 df = chart_partials(f, p);
        CHECK((induced_metric(p).g * grad - df).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("covariant hessian is symmetric") {
    std::mt19937_64 gen(206);
    ScalarField f;
    f.value = [](const ChartPoint& p) {
        return p.x(0) * p.x(5) + p.x(6) * p.x(6) * p.x(3);
    };
    for (int trial = 0; trial < 5; ++trial) {
        const ChartPoint p = random_chart_point(gen, 0.5);
        const Mat7 h = riemannian_hessian(f, p);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    }
}
