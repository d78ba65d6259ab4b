// Acceptance suite for the stability pipeline. Each criterion prints one
// [PASS]/[FAIL] line with the measured error and the tolerance it was held
// to; the process exits nonzero if any criterion fails. Pass the CLI binary
// path as argv[1] to run the reproducibility check against the real
// executable (without it the check falls back to the in-process entry point).

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leafstab/classifier.hpp"
#include "leafstab/config.hpp"
#include "leafstab/manifold.hpp"
#include "leafstab/simulator.hpp"
#include "leafstab/stability.hpp"
#include "leafstab/vehicle.hpp"
#include "leafstab/verify.hpp"

using namespace leafstab;

namespace {

const VehicleParams kRef{};

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

double draw_range(Rng& r, double lo, double hi) {
    return lo + (hi - lo) * r.uniform();
}

// Spin magnitude in [0.5, 3] with a random sign, so every draw is a valid
// equilibrium a safe distance from the zero-spin degeneracy.
double draw_spin(Rng& r) {
    const double mag = 0.5 + 2.5 * r.uniform();
    return r.uniform() < 0.5 ? -mag : mag;
}

// Error metric used throughout: relative where the reference is O(1) or
// larger, absolute where it passes through zero.
double mixed_err(double got, double ref) {
    return std::abs(got - ref) / (1.0 + std::abs(ref));
}

ConstraintSet level_set_problem(const VehicleParams& p, double lambda) {
    const ChartFieldSet f = chart_fields(p, lambda);
    ConstraintSet cs;
    cs.constraints = {f.C1, f.C3, f.C5};
    cs.objective = f.G;
    return cs;
}

void criterion_multipliers() {
    const double tol = 1e-10;
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3.0, 3.0)};
        const double lambda = draw_range(rng, -2.0, 2.0);
        const ChartPoint xe = equilibrium_chart_point(e);
        const ConstraintSet cs = level_set_problem(kRef, lambda);
        const MultiplierVector num = lagrange_multipliers(cs, xe);
        const std::array<double, 3> ref =
            closed_form_multipliers(e, kRef, lambda);
        for (int k = 0; k < 3; ++k)
            worst = std::max(worst, mixed_err(num.sigma[k], ref[k]));
    }
    report(1, "multiplier closed forms", worst < tol,
           fmt("n=20   max_err=%.2e  tol=%.0e", worst, tol));
}

void criterion_first_order() {
    const double tol = 1e-9;
    Rng rng(102);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3.0, 3.0)};
        const double lambda = draw_range(rng, -2.0, 2.0);
        const ChartPoint xe = equilibrium_chart_point(e);
        worst = std::max(
            worst, first_order_residual(level_set_problem(kRef, lambda), xe));
    }
    report(2, "first-order condition residual", worst < tol,
           fmt("n=20   max_res=%.2e  tol=%.0e", worst, tol));
}

void criterion_hessian() {
    const double tol = 1e-8;
    Rng rng(103);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3.0, 3.0)};
        const double lambda = draw_range(rng, -2.0, 2.0);
        const Eigen::Matrix4d num = numeric_projected_hessian(e, kRef, lambda);
        const Eigen::Matrix4d ref = closed_form_hessian(e, kRef, lambda);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                worst = std::max(worst, mixed_err(num(r, c), ref(r, c)));
    }
    report(3, "projected Hessian entries", worst < tol,
           fmt("n=10   max_err=%.2e  tol=%.0e", worst, tol));
}

void criterion_minors() {
    const double tol = 1e-8;
    Rng rng(104);
    const double a = derived_coeffs(kRef).a();
    double worst = 0.0;
    int used = 0;
    for (int i = 0; i < 20; ++i) {
        const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3.0, 3.0)};
        const double lambda = draw_range(rng, -2.0, 2.0);
        const Eigen::Matrix4d h = closed_form_hessian(e, kRef, lambda);
        const double t1 = h(0, 0);
        const double t2 = h.topLeftCorner<2, 2>().determinant();
        const double t3 = h.topLeftCorner<3, 3>().determinant();
        const double t4 = h.determinant();
        if (std::abs(t3) <= 1e-6) continue;
        ++used;
        worst = std::max(worst, mixed_err(t1, a));
        worst = std::max(worst, mixed_err(t2, a * a));
        worst = std::max(worst, mixed_err(t4 * a * a, t3 * t3));
    }
    report(4, "principal minor identities", worst < tol && used > 0,
           fmt("n=%-4d max_err=%.2e  tol=%.0e", used, worst, tol));
}

VehicleParams draw_admissible_params(Rng& rng) {
    for (;;) {
        VehicleParams p;
        p.m1 = p.m2 = draw_range(rng, 0.5, 5.0);
        p.m3 = draw_range(rng, 0.3, 3.0);
        p.I1 = p.I2 = draw_range(rng, 0.5, 5.0);
        p.I3 = draw_range(rng, 0.5, 3.0);
        p.m = draw_range(rng, 0.3, 2.0);
        p.l = draw_range(rng, 0.05, 1.0);
        p.g = draw_range(rng, 1.0, 15.0);
        if (p.m1 * p.I1 - p.m * p.m * p.l * p.l >= 1e-3) return p;
    }
}

void criterion_inequality() {
    Rng rng(105);

    // Sign agreement between "some lambda makes theta3 positive" and the
    // scalar threshold, away from a thin boundary band.
    int used = 0, violations = 0;
    for (int i = 0; i < 500; ++i) {
        const VehicleParams p = draw_admissible_params(rng);
        const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3.0, 3.0)};
        const InequalityReport ineq = stability_inequality(e, p);
        if (std::abs(ineq.margin) <= 1e-9) continue;
        ++used;
        const bool exists = lambda_star(theta_quadratic(e, p)).exists_positive;
        if (exists != (ineq.margin > 0.0)) ++violations;
    }

    // Recover the threshold blind, by bisecting on m*g*l through g, and
    // compare it with the closed form.
    double bisect_err = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        VehicleParams p;
        p.m1 = p.m2 = draw_range(rng, 2.0, 5.0);
        p.m3 = draw_range(rng, 0.3, 0.8);
        p.I1 = p.I2 = draw_range(rng, 1.5, 5.0);
        p.I3 = draw_range(rng, 0.5, 2.0);
        p.m = draw_range(rng, 0.5, 1.0);
        p.l = draw_range(rng, 0.1, 0.6);
        const EquilibriumSpec e{draw_spin(rng) / 3.0,
                                draw_range(rng, 1.5, 3.0)};
        const double threshold = stability_inequality(e, p).rhs;
        const auto solvable = [&](double mgl) {
            VehicleParams q = p;
            q.g = mgl / (q.m * q.l);
            return lambda_star(theta_quadratic(e, q)).exists_positive;
        };
        double lo = threshold - 0.4, hi = threshold + 0.4;
        if (solvable(lo) || !solvable(hi)) {
            bisect_err = 1.0;
            break;
        }
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            (solvable(mid) ? hi : lo) = mid;
        }
        bisect_err =
            std::max(bisect_err, std::abs(0.5 * (lo + hi) - threshold));
    }

    const bool pass = violations == 0 && bisect_err <= 1e-6;
    report(5, "solvability threshold", pass,
           fmt("n=%-4d violations=%d  bisect_err=%.2e  tol=%.0e", used,
               violations, bisect_err, 1e-6));
}

void criterion_christoffel() {
    const double tol = 1e-6;
    Rng rng(106);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const EquilibriumSpec e{draw_spin(rng), draw_range(rng, -3.0, 3.0)};
        const ChartPoint xe = equilibrium_chart_point(e);
        const ChristoffelAt ch = christoffel(xe);
        const double spin = e.P_e / (e.P_e * e.P_e + 1.0);
        for (int k = 0; k < 7; ++k) {
            for (int i = 0; i < 7; ++i) {
                for (int j = 0; j < 7; ++j) {
                    double expected = 0.0;
                    if ((k == 3 && ((i == 3 && j == 6) || (i == 6 && j == 3))) ||
                        (k == 4 && ((i == 4 && j == 6) || (i == 6 && j == 4))))
                        expected = spin;
                    else if (k == 6 && ((i == 5 && j == 6) || (i == 6 && j == 5)))
                        expected = 1.0;
                    worst = std::max(worst,
                                     std::abs(ch.Gamma[k](i, j) - expected));
                }
            }
        }
    }
    report(6, "Christoffel slots at equilibria", worst < tol,
           fmt("n=5    max_err=%.2e  tol=%.0e", worst, tol));
}

void criterion_pullback() {
    const double tol = 1e-10;
    Rng rng(107);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        ChartPoint p;
        p.chart = (i % 2 == 0) ? ChartId::GammaChart : ChartId::PChart;
        for (int k = 0; k < 7; ++k) p.x(k) = draw_range(rng, -2.0, 2.0);
        if (p.x.segment<3>(3).norm() < 0.3)
            p.x(3) += 1.0;  // keep the direction triple well conditioned
        const double h = 1e-4;
        Eigen::Matrix<double, 9, 7> J;
        for (int k = 0; k < 7; ++k) {
            ChartPoint hi = p, lo = p;
            hi.x(k) += h;
            lo.x(k) -= h;
            J.col(k) = (embed(hi).to_vec() - embed(lo).to_vec()) / (2.0 * h);
        }
        const Mat7 pullback = J.transpose() * J;
        const Mat7 closed = induced_metric(p).g;
        worst = std::max(worst, (pullback - closed).cwiseAbs().maxCoeff());
    }
    report(7, "metric pullback", worst < tol,
           fmt("n=20   max_err=%.2e  tol=%.0e", worst, tol));
}

void criterion_dynamics() {
    Rng rng(108);

    double field_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        AmbientState z;
        for (int k = 0; k < 3; ++k) {
            z.Pi(k) = draw_range(rng, -2.0, 2.0);
            z.P(k) = draw_range(rng, -2.0, 2.0);
            z.Gamma(k) = draw_range(rng, -2.0, 2.0);
        }
        const Vec9 direct = vector_field(z, kRef);
        const Vec9 bracket =
            poisson_tensor(z) * hamiltonian_gradient(z, kRef);
        field_err =
            std::max(field_err, (direct - bracket).cwiseAbs().maxCoeff());
    }

    IntegratorConfig integ;  // rel_tol 1e-10, t_final 100
    AmbientState z0 = equilibrium_state({1.0, 2.0});
    Vec9 kick;
    for (int k = 0; k < 9; ++k) kick(k) = rng.gaussian();
    z0 = AmbientState::from_vec(z0.to_vec() + 0.3 * kick);
    const Trajectory traj = integrate(z0, kRef, integ);
    const ConservationReport cons = conservation_report(traj, kRef);
    double drift = std::max({cons.dH, cons.dC1, cons.dC2, cons.dC3});
    const double k_drift = cons.dK.value_or(1.0);
    drift = std::max(drift, k_drift);

    ChartPoint on;
    on.x << 0.01, -0.02, 1.0, 0.015, -0.01, 0.998, 2.01;
    const Trajectory aligned = integrate(embed(on), kRef, integ);
    const double defect = invariance_report(aligned);

    const bool pass = field_err < 1e-11 && drift < 1e-8 && defect < 1e-8;
    report(8, "field identity and conservation", pass,
           fmt("field=%.2e/1e-11  drift=%.2e/1e-8  defect=%.2e/1e-8",
               field_err, drift, defect));
}

void criterion_probes() {
    IntegratorConfig integ;
    integ.t_final = 200.0;

    ProbeConfig probe;  // epsilon 1e-3, 20 samples, escape radius 0.1
    probe.seed = 2026;

    probe.mode = ProbeMode::FullSpace;
    const ProbeReport full =
        stability_probe({1.0, 2.0}, kRef, probe, integ);

    probe.mode = ProbeMode::Submanifold;
    const ProbeReport mid = stability_probe({3.0, 3.0}, kRef, probe, integ);
    const ProbeReport bad = stability_probe({1.0, 3.0}, kRef, probe, integ);

    const bool pass = !full.escaped && !mid.escaped && bad.escaped;
    report(9, "perturbation probes", pass,
           fmt("stable(1,2): dev=%.2e esc=%d  restricted(3,3): dev=%.2e "
               "esc=%d  unstable(1,3): esc=%d",
               full.max_deviation, full.escaped ? 1 : 0, mid.max_deviation,
               mid.escaped ? 1 : 0, bad.escaped ? 1 : 0));

    // Ambient behavior at the restricted-stability point is an open question;
    // the probe below records what happens and is excluded from pass/fail.
    probe.mode = ProbeMode::FullSpace;
    const ProbeReport open_case =
        stability_probe({3.0, 3.0}, kRef, probe, integ);
    std::printf("[EXPLORATORY] 9x full-space probe at (3,3): max_deviation="
                "%.3e escaped=%s\n",
                open_case.max_deviation, open_case.escaped ? "true" : "false");
}

void criterion_reproducibility(const char* cli_path) {
    bool pass = false;
    std::string detail;
    if (cli_path != nullptr) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "leafstab_acceptance";
        fs::create_directories(dir);
        const fs::path cfg_path = dir / "verify.ini";
        {
            std::ofstream os(cfg_path);
            write_config(os, RunConfig{});
        }
        const fs::path out1 = dir / "report1.txt";
        const fs::path out2 = dir / "report2.txt";
        const auto run = [&](const fs::path& out) {
            const std::string cmd = std::string("\"") + cli_path +
                                    "\" verify --config \"" +
                                    cfg_path.string() + "\" --seed 7 > \"" +
                                    out.string() + "\" 2>&1";
            return std::system(cmd.c_str());
        };
        const int rc1 = run(out1);
        const int rc2 = run(out2);
        const auto slurp = [](const fs::path& path) {
            std::ifstream is(path, std::ios::binary);
            std::ostringstream ss;
            ss << is.rdbuf();
            return ss.str();
        };
        const std::string r1 = slurp(out1);
        const std::string r2 = slurp(out2);
        pass = rc1 == 0 && rc2 == 0 && !r1.empty() && r1 == r2;
        detail = fmt("cli runs: rc=%d/%d  bytes=%zu  identical=%s", rc1, rc2,
                     r1.size(), r1 == r2 ? "yes" : "no");
    } else {
        const VerifyResult r1 = run_verify(kRef, 7);
        const VerifyResult r2 = run_verify(kRef, 7);
        pass = r1.ok && r2.ok && r1.report == r2.report;
        detail = fmt("in-process runs: ok=%d/%d  identical=%s", r1.ok ? 1 : 0,
                     r2.ok ? 1 : 0, r1.report == r2.report ? "yes" : "no");
    }
    report(10, "verify reproducibility", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    const char* cli_path = argc > 1 ? argv[1] : nullptr;

    criterion_multipliers();
    criterion_first_order();
    criterion_hessian();
    criterion_minors();
    criterion_inequality();
    criterion_christoffel();
    criterion_pullback();
    criterion_dynamics();
    criterion_probes();
    criterion_reproducibility(cli_path);

    if (g_failures == 0) {
        std::printf("acceptance: all 10 criteria PASS\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
