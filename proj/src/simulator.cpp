#include "leafstab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "leafstab/stability.hpp"

namespace leafstab {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw ValidationError("integrator: tolerances must be positive");
    }
    if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max)) {
        throw ValidationError(
            "integrator: need 0 < dt_min <= dt_init <= dt_max");
    }
    if (!(t_final > 0.0)) {
        throw ValidationError("integrator: t_final must be positive");
    }
    if (max_steps <= 0) {
        throw ValidationError("integrator: max_steps must be positive");
    }
}

const char* to_string(ProbeMode mode) {
    switch (mode) {
        case ProbeMode::Leaf:
            return "Leaf";
        case ProbeMode::Submanifold:
            return "Submanifold";
        case ProbeMode::FullSpace:
            return "FullSpace";
    }
    return "?";
}

namespace {

// Dormand-Prince 5(4) coefficients. The field is autonomous, so the stage
// times are never needed. The fifth-order b row doubles as the last stage's
// a-row, so the final evaluation of an accepted step seeds the next one
// (FSAL).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b5 - b4 rows, for the embedded error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepperCallbacks {
    const VehicleParams& p;
    Vec9 operator()(const Vec9& z) const {
        return vector_field(AmbientState::from_vec(z), p);
    }
};

struct StepCounts {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
};

StepCounts run_stepper(const AmbientState& z0, const VehicleParams& p,
                       const IntegratorConfig& cfg,
                       const StepObserver& observer) {
    cfg.validate();
    p.validate();
    const StepperCallbacks f{p};
    StepCounts counts;

    double t = 0.0;
    Vec9 z = z0.to_vec();
    Vec9 k1 = f(z);
    double dt = cfg.dt_init;
    std::int64_t steps = 0;

    if (observer && !observer(t, AmbientState::from_vec(z))) {
        return counts;
    }

    while (t < cfg.t_final) {
        if (++steps > cfg.max_steps) {
            throw MaxStepsExceeded("integrate: exceeded " +
                                   std::to_string(cfg.max_steps) +
                                   " steps at t = " + std::to_string(t));
        }
        const bool last = t + dt >= cfg.t_final;
        if (last) {
            dt = cfg.t_final - t;
        }

        const Vec9 k2 = f(z + dt * (a21 * k1));
        const Vec9 k3 = f(z + dt * (a31 * k1 + a32 * k2));
        const Vec9 k4 = f(z + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec9 k5 =
            f(z + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec9 k6 = f(z + dt * (a61 * k1 + a62 * k2 + a63 * k3 +
                                    a64 * k4 + a65 * k5));
        const Vec9 z_new =
            z + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec9 k7 = f(z_new);

        const Vec9 err_vec = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                   e6 * k6 + e7 * k7);
        double err = 0.0;
        for (int i = 0; i < 9; ++i) {
            const double scale =
                cfg.abs_tol +
                cfg.rel_tol * std::max(std::abs(z(i)), std::abs(z_new(i)));
            const double r = err_vec(i) / scale;
            err += r * r;
        }
        err = std::sqrt(err / 9.0);

        if (err <= 1.0) {
            t = last ? cfg.t_final : t + dt;
            z = z_new;
            k1 = k7;  // FSAL
            ++counts.accepted;
            if (observer && !observer(t, AmbientState::from_vec(z))) {
                return counts;
            }
            const double grow =
                err == 0.0 ? 5.0
                           : std::min(5.0, 0.9 * std::pow(err, -0.2));
            dt = std::min(cfg.dt_max, dt * std::max(0.2, grow));
        } else {
            ++counts.rejected;
            const double shrink =
                std::max(0.2, std::min(1.0, 0.9 * std::pow(err, -0.2)));
            dt *= shrink;
            if (dt < cfg.dt_min) {
                throw StepSizeUnderflow(
                    "integrate: step size fell below dt_min at t = " +
                    std::to_string(t));
            }
        }
    }
    return counts;
}

}  // namespace

void integrate_observed(const AmbientState& z0, const VehicleParams& p,
                        const IntegratorConfig& cfg,
                        const StepObserver& observer) {
    run_stepper(z0, p, cfg, observer);
}

Trajectory integrate(const AmbientState& z0, const VehicleParams& p,
                     const IntegratorConfig& cfg) {
    Trajectory traj;
    const StepCounts counts =
        run_stepper(z0, p, cfg, [&](double t, const AmbientState& z) {
            traj.t.push_back(t);
            traj.z.push_back(z);
            return true;
        });
    traj.accepted = counts.accepted;
    traj.rejected = counts.rejected;
    return traj;
}

ConservationReport conservation_report(const Trajectory& traj,
                                       const VehicleParams& p) {
    if (traj.z.empty()) {
        throw Error("conservation_report: empty trajectory");
    }
    ConservationReport r;
    const AmbientState& z0 = traj.z.front();
    const double H0 = hamiltonian(z0, p);
    const auto inv0 = invariants_eval(z0);
    const double K0 = z0.Pi(2);
    const double defect0 = z0.P.cross(z0.Gamma).norm();
    r.c4_c5_informational = defect0 > 1e-12;

    double dK = 0.0;
    for (const AmbientState& z : traj.z) {
        r.dH = std::max(r.dH, std::abs(hamiltonian(z, p) - H0));
        const auto inv = invariants_eval(z);
        r.dC1 = std::max(r.dC1, std::abs(inv[0] - inv0[0]));
        r.dC2 = std::max(r.dC2, std::abs(inv[1] - inv0[1]));
        r.dC3 = std::max(r.dC3, std::abs(inv[2] - inv0[2]));
        r.dC4 = std::max(r.dC4, std::abs(inv[3] - inv0[3]));
        r.dC5 = std::max(r.dC5, std::abs(inv[4] - inv0[4]));
        dK = std::max(dK, std::abs(z.Pi(2) - K0));
    }
    if (p.symmetric()) {
        r.dK = dK;
    }
    return r;
}

double invariance_report(const Trajectory& traj) {
    double worst = 0.0;
    for (const AmbientState& z : traj.z) {
        worst = std::max(worst, z.P.cross(z.Gamma).norm());
    }
    return worst;
}

double Rng::uniform() {
    // 53 random bits to a double in [0,1); fixed arithmetic keeps the
    // stream identical across standard libraries.
    const std::uint64_t bits = state_() >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u1 = uniform();
    while (u1 == 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

namespace {

// Scales a chart-space direction so the embedded point sits at Euclidean
// distance epsilon from the base state. Newton on the scalar scale; the
// distance grows monotonically from 0 for the small factors used here.
ChartPoint scale_to_ambient_radius(const ChartPoint& base, const Vec7& dir,
                                   const AmbientState& ze, double epsilon) {
    double alpha = epsilon / std::max(1e-300, dir.norm());
    for (int it = 0; it < 60; ++it) {
        ChartPoint probe = base;
        probe.x += alpha * dir;
        const double dist = (embed(probe).to_vec() - ze.to_vec()).norm();
        if (std::abs(dist - epsilon) <= 1e-12 * epsilon) {
            return probe;
        }
        if (dist <= 0.0) {
            throw ProjectionFailed("probe: degenerate perturbation");
        }
        alpha *= epsilon / dist;
    }
    throw ProjectionFailed("probe: could not normalize perturbation radius");
}

// Newton correction of a chart point back onto the joint level set of the
// constraints, through the pseudo-inverse of the constraint differentials.
ChartPoint project_to_leaf(ChartPoint x, const std::vector<ScalarField>& cons,
                           const std::vector<double>& targets) {
    const int q = static_cast<int>(cons.size());
    for (int it = 0; it < 50; ++it) {
        VecX r(q);
        for (int s = 0; s < q; ++s) {
            r(s) = cons[static_cast<size_t>(s)].value(x) -
                   targets[static_cast<size_t>(s)];
        }
        if (r.cwiseAbs().maxCoeff() < 1e-12) {
            return x;
        }
        MatX J(q, 7);
        for (int s = 0; s < q; ++s) {
            J.row(s) = chart_partials(cons[static_cast<size_t>(s)], x)
                           .transpose();
        }
        const MatX JJt = J * J.transpose();
        const VecX y = JJt.ldlt().solve(r);
        x.x -= J.transpose() * y;
        if (!x.valid()) {
            throw ProjectionFailed(
                "probe: leaf projection left the chart domain");
        }
    }
    throw ProjectionFailed(
        "probe: leaf projection did not converge in 50 iterations");
}

}  // namespace

ProbeReport stability_probe(const EquilibriumSpec& e, const VehicleParams& p,
                            const ProbeConfig& probe,
                            const IntegratorConfig& integ) {
    p.validate();
    if (!(probe.epsilon > 0.0) || probe.samples <= 0 ||
        !(probe.escape_radius > 0.0)) {
        throw ValidationError("probe: epsilon, samples, escape_radius must "
                              "be positive");
    }
    if (probe.mode != ProbeMode::FullSpace && !p.symmetric()) {
        throw AsymmetricParams(
            "probe: Leaf and Submanifold modes need the symmetric case");
    }

    const AmbientState ze = equilibrium_state(e);
    const ChartPoint xe = equilibrium_chart_point(e);
    Rng rng(probe.seed);

    // Constraint data for Leaf mode, fixed at the equilibrium.
    std::vector<ScalarField> cons;
    std::vector<double> targets;
    std::vector<Vec7> leaf_basis;
    if (probe.mode == ProbeMode::Leaf) {
        const ChartFieldSet fields = chart_fields(p, 0.0);
        cons = {fields.C1, fields.C3, fields.C5};
        for (const ScalarField& f : cons) {
            targets.push_back(f.value(xe));
        }
        leaf_basis = tangent_basis(cons, xe);
    }

    // All initial states are drawn up front so the sampling stream depends
    // only on the seed, not on integration order.
    std::vector<AmbientState> starts;
    starts.reserve(static_cast<size_t>(probe.samples));
    for (int s = 0; s < probe.samples; ++s) {
        switch (probe.mode) {
            case ProbeMode::FullSpace: {
                Vec9 dir;
                for (int i = 0; i < 9; ++i) {
                    dir(i) = rng.gaussian();
                }
                dir.normalize();
                starts.push_back(
                    AmbientState::from_vec(ze.to_vec() + probe.epsilon * dir));
                break;
            }
            case ProbeMode::Submanifold: {
                Vec7 dir;
                for (int i = 0; i < 7; ++i) {
                    dir(i) = rng.gaussian();
                }
                const ChartPoint start =
                    scale_to_ambient_radius(xe, dir, ze, probe.epsilon);
                starts.push_back(embed(start));
                break;
            }
            case ProbeMode::Leaf: {
                Vec7 dir = Vec7::Zero();
                for (const Vec7& v : leaf_basis) {
                    dir += rng.gaussian() * v;
                }
                ChartPoint start =
                    scale_to_ambient_radius(xe, dir, ze, probe.epsilon);
                start = project_to_leaf(start, cons, targets);
                starts.push_back(embed(start));
                break;
            }
        }
    }

    ProbeReport report;
    report.mode = probe.mode;
    report.epsilon = probe.epsilon;
    report.samples = probe.samples;
    report.escape_radius = probe.escape_radius;

    const Vec9 ze_vec = ze.to_vec();
    for (const AmbientState& z0 : starts) {
        SampleResult sample;
        integrate_observed(z0, p, integ, [&](double t, const AmbientState& z) {
            const double dev = (z.to_vec() - ze_vec).norm();
            sample.max_deviation = std::max(sample.max_deviation, dev);
            sample.t_end = t;
            if (dev > probe.escape_radius) {
                sample.escaped = true;
                return false;  // verdict decided, stop integrating
            }
            return true;
        });
        report.per_sample.push_back(sample);
        report.max_deviation =
            std::max(report.max_deviation, sample.max_deviation);
        report.escaped = report.escaped || sample.escaped;
    }
    return report;
}

namespace {

void put17(std::ostream& os, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,Pi1,Pi2,Pi3,P1,P2,P3,G1,G2,G3\n";
    for (size_t i = 0; i < traj.t.size(); ++i) {
        put17(os, traj.t[i]);
        const Vec9 z = traj.z[i].to_vec();
        for (int j = 0; j < 9; ++j) {
            os << ',';
            put17(os, z(j));
        }
        os << '\n';
    }
}

void write_probe_csv(std::ostream& os, const ProbeReport& report) {
    os << "sample,max_deviation,escaped,t_end\n";
    for (size_t i = 0; i < report.per_sample.size(); ++i) {
        const SampleResult& s = report.per_sample[i];
        os << i << ',';
        put17(os, s.max_deviation);
        os << ',' << (s.escaped ? 1 : 0) << ',';
        put17(os, s.t_end);
        os << '\n';
    }
}

}  // namespace leafstab
