#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "leafstab/classifier.hpp"
#include "leafstab/config.hpp"
#include "leafstab/simulator.hpp"
#include "leafstab/verify.hpp"

namespace fs = std::filesystem;
using namespace leafstab;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Output paths resolve against --out unless the configured path is absolute.
fs::path resolve_out(const std::string& configured, const std::string& out_dir,
                     const char* fallback) {
    fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
    if (p.is_absolute()) {
        return p;
    }
    return fs::path(out_dir) / p;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream os(p);
    if (!os) {
        throw ValidationError("cannot open output file '" + p.string() + "'");
    }
    return os;
}

int label_code(RegionLabel label) {
    switch (label) {
        case RegionLabel::StableFull:
            return 0;
        case RegionLabel::StableOnSubmanifold:
            return 1;
        case RegionLabel::Unstable:
            return 2;
        case RegionLabel::Boundary:
            return 3;
    }
    return 3;
}

const char* label_color(RegionLabel label) {
    switch (label) {
        case RegionLabel::StableFull:
            return "#2d7dd2";
        case RegionLabel::StableOnSubmanifold:
            return "#97cc04";
        case RegionLabel::Unstable:
            return "#f45d01";
        case RegionLabel::Boundary:
            return "#474647";
    }
    return "#474647";
}

int run_classify(const RunConfig& cfg) {
    const Classification c =
        classify(cfg.equilibrium, cfg.params, cfg.tolerances.boundary);
    std::cout << "label = " << to_string(c.label) << "\n"
              << "margin_full = " << fmt17(c.margin_full) << "\n"
              << "margin_leaf = " << fmt17(c.margin_leaf) << "\n"
              << "lambda_star = " << fmt17(c.lambda_star.lambda) << "\n"
              << "theta_max = " << fmt17(c.lambda_star.theta_max) << "\n"
              << "sigma = (" << fmt17(c.sigma[0]) << ", " << fmt17(c.sigma[1])
              << ", " << fmt17(c.sigma[2]) << ")\n";

    const Eigen::Matrix4d hess = numeric_projected_hessian(
        cfg.equilibrium, cfg.params, c.lambda_star.lambda);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(hess);
    std::cout << "hessian_eigenvalues = (";
    for (int i = 0; i < 4; ++i) {
        std::cout << (i ? ", " : "") << fmt17(es.eigenvalues()(i));
    }
    std::cout << ")\n";
    return 0;
}

void write_plot_data(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << "P_e,Pi_e,label_code\n";
    for (const ScanRow& r : rows) {
        os << fmt17(r.P_e) << ',' << fmt17(r.Pi_e) << ','
           << label_code(r.label) << '\n';
    }
}

void write_region_svg(std::ostream& os, const std::vector<ScanRow>& rows,
                      const ScanGrid& grid) {
    const double w = 640, h = 640, margin = 60;
    const double x_lo = grid.P_min - 0.5 * grid.P_step;
    const double x_hi = grid.P_max + 0.5 * grid.P_step;
    const double y_lo = grid.Pi_min - 0.5 * grid.Pi_step;
    const double y_hi = grid.Pi_max + 0.5 * grid.Pi_step;
    const double sx = (w - 2 * margin) / (x_hi - x_lo);
    const double sy = (h - 2 * margin) / (y_hi - y_lo);
    const double cw = grid.P_step * sx, ch = grid.Pi_step * sy;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
       << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"" << w << "\" height=\"" << h
       << "\" fill=\"white\"/>\n";
    for (const ScanRow& r : rows) {
        const double cx = margin + (r.P_e - x_lo) * sx;
        const double cy = h - margin - (r.Pi_e - y_lo) * sy;
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" "
                      "height=\"%.2f\" fill=\"%s\"/>\n",
                      cx - cw / 2, cy - ch / 2, cw, ch,
                      label_color(r.label));
        os << buf;
    }
    os << "<text x=\"" << w / 2 << "\" y=\"" << h - margin / 3
       << "\" text-anchor=\"middle\" font-family=\"monospace\">P_e</text>\n";
    os << "<text x=\"" << margin / 3 << "\" y=\"" << h / 2
       << "\" text-anchor=\"middle\" font-family=\"monospace\" "
          "transform=\"rotate(-90 "
       << margin / 3 << " " << h / 2 << ")\">Pi_e</text>\n";
    os << "</svg>\n";
}

int run_scan(const RunConfig& cfg, const std::string& out_dir) {
    const std::vector<ScanRow> rows =
        scan(cfg.scan, cfg.params, cfg.tolerances.boundary);
    const fs::path csv =
        resolve_out(cfg.output.csv_path, out_dir, "scan.csv");
    {
        std::ofstream os = open_out(csv);
        write_scan_csv(os, rows);
    }
    std::cout << "scan: " << rows.size() << " points -> " << csv.string()
              << "\n";
    if (!cfg.output.plot_data_path.empty()) {
        const fs::path plot =
            resolve_out(cfg.output.plot_data_path, out_dir, "plot.csv");
        {
            std::ofstream os = open_out(plot);
            write_plot_data(os, rows);
        }
        fs::path svg = plot;
        svg += ".svg";
        {
            std::ofstream os = open_out(svg);
            write_region_svg(os, rows, cfg.scan);
        }
        std::cout << "plot data -> " << plot.string() << "\n"
                  << "region map -> " << svg.string() << "\n";
    }
    return 0;
}

int run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    // The run starts from the first perturbation of the configured probe
    // stream, so [probe] controls the initial offset and the seed pins the
    // trajectory bit for bit.
    const AmbientState ze = equilibrium_state(cfg.equilibrium);
    Rng rng(cfg.probe.seed);
    Vec9 dir;
    for (int i = 0; i < 9; ++i) {
        dir(i) = rng.gaussian();
    }
    dir.normalize();
    const AmbientState z0 =
        AmbientState::from_vec(ze.to_vec() + cfg.probe.epsilon * dir);

    const Trajectory traj = integrate(z0, cfg.params, cfg.integrator);
    const fs::path csv =
        resolve_out(cfg.output.csv_path, out_dir, "trajectory.csv");
    {
        std::ofstream os = open_out(csv);
        write_trajectory_csv(os, traj);
    }

    const ConservationReport cons = conservation_report(traj, cfg.params);
    std::cout << "trajectory -> " << csv.string() << "\n"
              << "steps accepted = " << traj.accepted
              << ", rejected = " << traj.rejected << "\n"
              << "dH = " << fmt17(cons.dH) << "\n"
              << "dC1 = " << fmt17(cons.dC1) << "\n"
              << "dC2 = " << fmt17(cons.dC2) << "\n"
              << "dC3 = " << fmt17(cons.dC3) << "\n";
    if (cons.dK) {
        std::cout << "dK = " << fmt17(*cons.dK) << "\n";
    }
    std::cout << "dC4 = " << fmt17(cons.dC4)
              << (cons.c4_c5_informational ? "  (informational)" : "") << "\n"
              << "dC5 = " << fmt17(cons.dC5)
              << (cons.c4_c5_informational ? "  (informational)" : "") << "\n"
              << "max |P x Gamma| = " << fmt17(invariance_report(traj))
              << "\n";
    return 0;
}

int run_probe(const RunConfig& cfg, const std::string& out_dir) {
    const ProbeReport report = stability_probe(cfg.equilibrium, cfg.params,
                                               cfg.probe, cfg.integrator);
    const fs::path csv = resolve_out(cfg.output.csv_path, out_dir, "probe.csv");
    {
        std::ofstream os = open_out(csv);
        write_probe_csv(os, report);
    }
    int escaped_count = 0;
    for (const SampleResult& s : report.per_sample) {
        escaped_count += s.escaped ? 1 : 0;
    }
    std::cout << "mode = " << to_string(report.mode) << "\n"
              << "epsilon = " << fmt17(report.epsilon) << "\n"
              << "samples = " << report.samples << "\n"
              << "escape_radius = " << fmt17(report.escape_radius) << "\n"
              << "max_deviation = " << fmt17(report.max_deviation) << "\n"
              << "escaped = " << (report.escaped ? "true" : "false") << " ("
              << escaped_count << "/" << report.samples << " samples)\n"
              << "per-sample CSV -> " << csv.string() << "\n";
    return 0;
}

int run_verify_cmd(const RunConfig& cfg, std::uint64_t seed) {
    const VerifyResult res = run_verify(cfg.params, seed);
    std::cout << res.report;
    return res.ok ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability toolkit for spinning underwater-vehicle equilibria"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed_override = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override the configured seed")
            ->each([&](const std::string&) { seed_given = true; });
        return sub;
    };

    add_common(app.add_subcommand("classify",
                                  "label one equilibrium by its margins"));
    add_common(app.add_subcommand("scan", "classify a grid of equilibria"));
    add_common(app.add_subcommand("simulate",
                                  "integrate one perturbed trajectory"));
    add_common(app.add_subcommand("probe",
                                  "sample perturbations and watch for escape"));
    add_common(app.add_subcommand("verify",
                                  "run the closed-form cross-check suite"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        RunConfig cfg = parse_config(config_path);
        if (seed_given) {
            cfg.probe.seed = seed_override;
        }
        if (app.got_subcommand("classify")) {
            return run_classify(cfg);
        }
        if (app.got_subcommand("scan")) {
            return run_scan(cfg, out_dir);
        }
        if (app.got_subcommand("simulate")) {
            return run_simulate(cfg, out_dir);
        }
        if (app.got_subcommand("probe")) {
            return run_probe(cfg, out_dir);
        }
        return run_verify_cmd(cfg, cfg.probe.seed);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
