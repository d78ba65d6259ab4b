#include "leafstab/vehicle.hpp"

#include <cmath>

namespace leafstab {

void VehicleParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw InvalidParams(std::string("params: ") + name +
                                " must be positive");
        }
    };
    positive(m1, "m1");
    positive(m2, "m2");
    positive(m3, "m3");
    positive(I1, "I1");
    positive(I2, "I2");
    positive(I3, "I3");
    positive(m, "m");
    positive(g, "g");
    if (l < 0.0) {
        throw InvalidParams("params: l must be nonnegative");
    }
    if (!(m2 * I1 - m * m * l * l > 0.0)) {
        throw InvalidParams("params: m2*I1 - (m*l)^2 must be positive");
    }
    if (!(m1 * I2 - m * m * l * l > 0.0)) {
        throw InvalidParams("params: m1*I2 - (m*l)^2 must be positive");
    }
}

double DerivedCoeffs::a() const {
    if (!is_symmetric) {
        throw AsymmetricParams("coeffs: alias a needs m1 == m2 and I1 == I2");
    }
    return a1;
}

double DerivedCoeffs::b() const {
    if (!is_symmetric) {
        throw AsymmetricParams("coeffs: alias b needs m1 == m2 and I1 == I2");
    }
    return b1;
}

double DerivedCoeffs::c() const {
    if (!is_symmetric) {
        throw AsymmetricParams("coeffs: alias c needs m1 == m2 and I1 == I2");
    }
    return c1;
}

DerivedCoeffs derived_coeffs(const VehicleParams& p) {
    p.validate();
    const double ml = p.m * p.l;
    const double d1 = p.m2 * p.I1 - ml * ml;  // pairs (Pi1, P2)
    const double d2 = p.m1 * p.I2 - ml * ml;  // pairs (Pi2, P1)

    DerivedCoeffs c;
    c.a1 = p.m2 / d1;
    c.a2 = p.m1 / d2;
    c.b1 = -ml / d2;
    c.b2 = -ml / d1;
    c.c1 = p.I2 / d2;
    c.c2 = p.I1 / d1;
    c.inv_I3 = 1.0 / p.I3;
    c.inv_m3 = 1.0 / p.m3;
    c.is_symmetric = p.symmetric();
    return c;
}

void velocities(const AmbientState& z, const VehicleParams& p, Vec3& Omega,
                Vec3& v) {
    const DerivedCoeffs c = derived_coeffs(p);
    Omega(0) = c.a1 * z.Pi(0) - c.b2 * z.P(1);
    Omega(1) = c.a2 * z.Pi(1) + c.b1 * z.P(0);
    Omega(2) = c.inv_I3 * z.Pi(2);
    v(0) = c.b1 * z.Pi(1) + c.c1 * z.P(0);
    v(1) = -c.b2 * z.Pi(0) + c.c2 * z.P(1);
    v(2) = c.inv_m3 * z.P(2);
}

double hamiltonian(const AmbientState& z, const VehicleParams& p) {
    Vec3 Omega, v;
    velocities(z, p, Omega, v);
    return 0.5 * (z.Pi.dot(Omega) + z.P.dot(v)) - p.mgl() * z.Gamma(2);
}

Vec9 hamiltonian_gradient(const AmbientState& z, const VehicleParams& p) {
    Vec3 Omega, v;
    velocities(z, p, Omega, v);
    Vec9 grad;
    grad << Omega, v, 0.0, 0.0, -p.mgl();
    return grad;
}

std::array<double, 5> invariants_eval(const AmbientState& z) {
    return {z.P.dot(z.Gamma), 0.5 * z.P.squaredNorm(),
            0.5 * z.Gamma.squaredNorm(), z.Pi.dot(z.P), z.Pi.dot(z.Gamma)};
}

Mat9 poisson_tensor(const AmbientState& z) {
    Mat9 L = Mat9::Zero();
    const Mat3 Pi_hat = hat(z.Pi);
    const Mat3 P_hat = hat(z.P);
    const Mat3 G_hat = hat(z.Gamma);
    L.block<3, 3>(0, 0) = Pi_hat;
    L.block<3, 3>(0, 3) = P_hat;
    L.block<3, 3>(0, 6) = G_hat;
    L.block<3, 3>(3, 0) = P_hat;
    L.block<3, 3>(6, 0) = G_hat;
    return L;
}

Vec9 vector_field(const AmbientState& z, const VehicleParams& p) {
    Vec3 Omega, v;
    velocities(z, p, Omega, v);
    const Vec3 r(0.0, 0.0, 1.0);
    Vec9 dz;
    dz.segment<3>(0) =
        z.Pi.cross(Omega) + z.P.cross(v) - p.mgl() * z.Gamma.cross(r);
    dz.segment<3>(3) = z.P.cross(Omega);
    dz.segment<3>(6) = z.Gamma.cross(Omega);
    return dz;
}

AmbientState equilibrium_state(const EquilibriumSpec& e) {
    if (e.Pi_e == 0.0) {
        throw ZeroSpin("equilibrium: Pi_e must be nonzero");
    }
    AmbientState z;
    z.Pi = Vec3(0.0, 0.0, e.Pi_e);
    z.P = Vec3(0.0, 0.0, e.P_e);
    z.Gamma = Vec3(0.0, 0.0, 1.0);
    return z;
}

ChartPoint equilibrium_chart_point(const EquilibriumSpec& e) {
    if (e.Pi_e == 0.0) {
        throw ZeroSpin("equilibrium: Pi_e must be nonzero");
    }
    ChartPoint p;
    p.chart = ChartId::GammaChart;
    p.x << 0.0, 0.0, e.Pi_e, 0.0, 0.0, 1.0, e.P_e;
    return p;
}

namespace {

void require_gamma_chart(const ChartPoint& p, const char* field) {
    if (p.chart != ChartId::GammaChart) {
        throw InvalidChartPoint(std::string(field) +
                                ": defined in the gamma chart only");
    }
}

}  // namespace

ChartFieldSet chart_fields(const VehicleParams& p, double lambda) {
    if (!p.symmetric()) {
        throw AsymmetricParams(
            "chart_fields: spin about the symmetry axis is conserved only "
            "when m1 == m2 and I1 == I2");
    }
    const DerivedCoeffs coeffs = derived_coeffs(p);
    const double a = coeffs.a();
    const double b = coeffs.b();
    const double c = coeffs.c();
    const double inv_I3 = coeffs.inv_I3;
    const double inv_m3 = coeffs.inv_m3;
    const double mgl = p.mgl();

    ChartFieldSet s;
    s.lambda = lambda;

    // Restriction of the energy to the chart. The cross terms inherit their
    // signs from the coupling block of the inverted mass matrix: the
    // composition with the embedding must reproduce the ambient value
    // exactly, and the tests hold it to 1e-12.
    s.H.name = "H";
    s.H.value = [=](const ChartPoint& q) {
        require_gamma_chart(q, "H");
        const Vec7& x = q.x;
        return 0.5 * a * (x(0) * x(0) + x(1) * x(1)) +
               0.5 * inv_I3 * x(2) * x(2) - b * x(0) * x(4) * x(6) +
               b * x(1) * x(3) * x(6) +
               0.5 * c * (x(3) * x(3) + x(4) * x(4)) * x(6) * x(6) +
               0.5 * inv_m3 * x(5) * x(5) * x(6) * x(6) - mgl * x(5);
    };
    s.H.partials = [=](const ChartPoint& q) {
        require_gamma_chart(q, "H");
        const Vec7& x = q.x;
        Vec7 d;
        d(0) = a * x(0) - b * x(4) * x(6);
        d(1) = a * x(1) + b * x(3) * x(6);
        d(2) = inv_I3 * x(2);
        d(3) = b * x(1) * x(6) + c * x(3) * x(6) * x(6);
        d(4) = -b * x(0) * x(6) + c * x(4) * x(6) * x(6);
        d(5) = inv_m3 * x(5) * x(6) * x(6) - mgl;
        d(6) = -b * x(0) * x(4) + b * x(1) * x(3) +
               c * (x(3) * x(3) + x(4) * x(4)) * x(6) +
               inv_m3 * x(5) * x(5) * x(6);
        return d;
    };
    s.H.second_partials = [=](const ChartPoint& q) {
        require_gamma_chart(q, "H");
        const Vec7& x = q.x;
        Mat7 m = Mat7::Zero();
        m(0, 0) = a;
        m(1, 1) = a;
        m(2, 2) = inv_I3;
        m(0, 4) = -b * x(6);
        m(0, 6) = -b * x(4);
        m(1, 3) = b * x(6);
        m(1, 6) = b * x(3);
        m(3, 3) = c * x(6) * x(6);
        m(3, 6) = b * x(1) + 2.0 * c * x(3) * x(6);
        m(4, 4) = c * x(6) * x(6);
        m(4, 6) = -b * x(0) + 2.0 * c * x(4) * x(6);
        m(5, 5) = inv_m3 * x(6) * x(6);
        m(5, 6) = 2.0 * inv_m3 * x(5) * x(6);
        m(6, 6) = c * (x(3) * x(3) + x(4) * x(4)) + inv_m3 * x(5) * x(5);
        Mat7 sym = m + m.transpose();
        sym.diagonal() = m.diagonal();
        return sym;
    };

    s.C1.name = "C1";
    s.C1.value = [](const ChartPoint& q) {
        require_gamma_chart(q, "C1");
        const Vec7& x = q.x;
        return (x(3) * x(3) + x(4) * x(4) + x(5) * x(5)) * x(6);
    };
    s.C1.partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C1");
        const Vec7& x = q.x;
        Vec7 d = Vec7::Zero();
        d(3) = 2.0 * x(3) * x(6);
        d(4) = 2.0 * x(4) * x(6);
        d(5) = 2.0 * x(5) * x(6);
        d(6) = x(3) * x(3) + x(4) * x(4) + x(5) * x(5);
        return d;
    };
    s.C1.second_partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C1");
        const Vec7& x = q.x;
        Mat7 m = Mat7::Zero();
        for (int i = 3; i < 6; ++i) {
            m(i, i) = 2.0 * x(6);
            m(i, 6) = m(6, i) = 2.0 * x(i);
        }
        return m;
    };

    s.C2.name = "C2";
    s.C2.value = [](const ChartPoint& q) {
        require_gamma_chart(q, "C2");
        const Vec7& x = q.x;
        return 0.5 * (x(3) * x(3) + x(4) * x(4) + x(5) * x(5)) * x(6) * x(6);
    };
    s.C2.partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C2");
        const Vec7& x = q.x;
        Vec7 d = Vec7::Zero();
        d(3) = x(3) * x(6) * x(6);
        d(4) = x(4) * x(6) * x(6);
        d(5) = x(5) * x(6) * x(6);
        d(6) = (x(3) * x(3) + x(4) * x(4) + x(5) * x(5)) * x(6);
        return d;
    };
    s.C2.second_partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C2");
        const Vec7& x = q.x;
        Mat7 m = Mat7::Zero();
        for (int i = 3; i < 6; ++i) {
            m(i, i) = x(6) * x(6);
            m(i, 6) = m(6, i) = 2.0 * x(i) * x(6);
        }
        m(6, 6) = x(3) * x(3) + x(4) * x(4) + x(5) * x(5);
        return m;
    };

    s.C3.name = "C3";
    s.C3.value = [](const ChartPoint& q) {
        require_gamma_chart(q, "C3");
        const Vec7& x = q.x;
        return 0.5 * (x(3) * x(3) + x(4) * x(4) + x(5) * x(5));
    };
    s.C3.partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C3");
        const Vec7& x = q.x;
        Vec7 d = Vec7::Zero();
        d(3) = x(3);
        d(4) = x(4);
        d(5) = x(5);
        return d;
    };
    s.C3.second_partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C3");
        Mat7 m = Mat7::Zero();
        m(3, 3) = m(4, 4) = m(5, 5) = 1.0;
        return m;
    };

    s.C4.name = "C4";
    s.C4.value = [](const ChartPoint& q) {
        require_gamma_chart(q, "C4");
        const Vec7& x = q.x;
        return (x(0) * x(3) + x(1) * x(4) + x(2) * x(5)) * x(6);
    };
    s.C4.partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C4");
        const Vec7& x = q.x;
        Vec7 d;
        d(0) = x(3) * x(6);
        d(1) = x(4) * x(6);
        d(2) = x(5) * x(6);
        d(3) = x(0) * x(6);
        d(4) = x(1) * x(6);
        d(5) = x(2) * x(6);
        d(6) = x(0) * x(3) + x(1) * x(4) + x(2) * x(5);
        return d;
    };
    s.C4.second_partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C4");
        const Vec7& x = q.x;
        Mat7 m = Mat7::Zero();
        for (int i = 0; i < 3; ++i) {
            m(i, i + 3) = m(i + 3, i) = x(6);
            m(i, 6) = m(6, i) = x(i + 3);
            m(i + 3, 6) = m(6, i + 3) = x(i);
        }
        return m;
    };

    s.C5.name = "C5";
    s.C5.value = [](const ChartPoint& q) {
        require_gamma_chart(q, "C5");
        const Vec7& x = q.x;
        return x(0) * x(3) + x(1) * x(4) + x(2) * x(5);
    };
    s.C5.partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C5");
        const Vec7& x = q.x;
        Vec7 d;
        d(0) = x(3);
        d(1) = x(4);
        d(2) = x(5);
        d(3) = x(0);
        d(4) = x(1);
        d(5) = x(2);
        d(6) = 0.0;
        return d;
    };
    s.C5.second_partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "C5");
        Mat7 m = Mat7::Zero();
        for (int i = 0; i < 3; ++i) {
            m(i, i + 3) = m(i + 3, i) = 1.0;
        }
        return m;
    };

    s.K.name = "K";
    s.K.value = [](const ChartPoint& q) {
        require_gamma_chart(q, "K");
        return q.x(2);
    };
    s.K.partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "K");
        Vec7 d = Vec7::Zero();
        d(2) = 1.0;
        return d;
    };
    s.K.second_partials = [](const ChartPoint& q) {
        require_gamma_chart(q, "K");
        return Mat7::Zero().eval();
    };

    s.G.name = "G";
    const ScalarField H = s.H;
    const ScalarField K = s.K;
    s.G.value = [=](const ChartPoint& q) {
        return H.value(q) + lambda * K.value(q);
    };
    s.G.partials = [=](const ChartPoint& q) {
        return (H.partials(q) + lambda * K.partials(q)).eval();
    };
    s.G.second_partials = [=](const ChartPoint& q) {
        return (H.second_partials(q) + lambda * K.second_partials(q)).eval();
    };

    return s;
}

}  // namespace leafstab
