#include "leafstab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace leafstab {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError(msg, line);
}

double parse_double(const std::string& v, int line) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) fail(line, "trailing characters after number '" + v + "'");
        return x;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& v, int line) {
    try {
        size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) fail(line, "trailing characters after integer '" + v + "'");
        return x;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected an integer, got '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& v, int line) {
    try {
        size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size() || (!v.empty() && v[0] == '-')) {
            fail(line, "expected a non-negative integer, got '" + v + "'");
        }
        return x;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, "expected a non-negative integer, got '" + v + "'");
    }
}

ProbeMode parse_mode(const std::string& v, int line) {
    if (v == "Leaf") return ProbeMode::Leaf;
    if (v == "Submanifold") return ProbeMode::Submanifold;
    if (v == "FullSpace") return ProbeMode::FullSpace;
    fail(line, "probe mode must be Leaf, Submanifold or FullSpace, got '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    // Keys before the first header belong to [params], so a bare list of
    // masses and inertias is a valid minimal file.
    std::string section = "params";
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "params" && section != "equilibrium" &&
                section != "integrator" && section != "probe" &&
                section != "scan" && section != "tolerances" &&
                section != "output") {
                fail(line_no, "unknown section [" + section + "]");
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");

        if (section == "params") {
            double* slot = nullptr;
            if (key == "m1") slot = &cfg.params.m1;
            else if (key == "m2") slot = &cfg.params.m2;
            else if (key == "m3") slot = &cfg.params.m3;
            else if (key == "I1") slot = &cfg.params.I1;
            else if (key == "I2") slot = &cfg.params.I2;
            else if (key == "I3") slot = &cfg.params.I3;
            else if (key == "m") slot = &cfg.params.m;
            else if (key == "l") slot = &cfg.params.l;
            else if (key == "g") slot = &cfg.params.g;
            else fail(line_no, "unknown key '" + key + "' in [params]");
            *slot = parse_double(val, line_no);
        } else if (section == "equilibrium") {
            if (key == "Pi_e") cfg.equilibrium.Pi_e = parse_double(val, line_no);
            else if (key == "P_e") cfg.equilibrium.P_e = parse_double(val, line_no);
            else fail(line_no, "unknown key '" + key + "' in [equilibrium]");
        } else if (section == "integrator") {
            if (key == "rel_tol") cfg.integrator.rel_tol = parse_double(val, line_no);
            else if (key == "abs_tol") cfg.integrator.abs_tol = parse_double(val, line_no);
            else if (key == "dt_init") cfg.integrator.dt_init = parse_double(val, line_no);
            else if (key == "dt_min") cfg.integrator.dt_min = parse_double(val, line_no);
            else if (key == "dt_max") cfg.integrator.dt_max = parse_double(val, line_no);
            else if (key == "t_final") cfg.integrator.t_final = parse_double(val, line_no);
            else if (key == "max_steps") cfg.integrator.max_steps = parse_int(val, line_no);
            else fail(line_no, "unknown key '" + key + "' in [integrator]");
        } else if (section == "probe") {
            if (key == "mode") cfg.probe.mode = parse_mode(val, line_no);
            else if (key == "epsilon") cfg.probe.epsilon = parse_double(val, line_no);
            else if (key == "samples") cfg.probe.samples = static_cast<int>(parse_int(val, line_no));
            else if (key == "seed") cfg.probe.seed = parse_uint(val, line_no);
            else if (key == "escape_radius") cfg.probe.escape_radius = parse_double(val, line_no);
            else fail(line_no, "unknown key '" + key + "' in [probe]");
        } else if (section == "scan") {
            if (key == "Pi_min") cfg.scan.Pi_min = parse_double(val, line_no);
            else if (key == "Pi_max") cfg.scan.Pi_max = parse_double(val, line_no);
            else if (key == "Pi_step") cfg.scan.Pi_step = parse_double(val, line_no);
            else if (key == "P_min") cfg.scan.P_min = parse_double(val, line_no);
            else if (key == "P_max") cfg.scan.P_max = parse_double(val, line_no);
            else if (key == "P_step") cfg.scan.P_step = parse_double(val, line_no);
            else fail(line_no, "unknown key '" + key + "' in [scan]");
        } else if (section == "tolerances") {
            if (key == "regularity") cfg.tolerances.regularity = parse_double(val, line_no);
            else if (key == "boundary") cfg.tolerances.boundary = parse_double(val, line_no);
            else if (key == "fd_metric") cfg.tolerances.fd.metric = parse_double(val, line_no);
            else if (key == "fd_first") cfg.tolerances.fd.first = parse_double(val, line_no);
            else if (key == "fd_second") cfg.tolerances.fd.second = parse_double(val, line_no);
            else fail(line_no, "unknown key '" + key + "' in [tolerances]");
        } else {  // output
            if (key == "csv_path") cfg.output.csv_path = val;
            else if (key == "plot_data_path") cfg.output.plot_data_path = val;
            else fail(line_no, "unknown key '" + key + "' in [output]");
        }
    }

    try {
        cfg.params.validate();
        cfg.integrator.validate();
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& err) {
        throw ValidationError(err.what());
    }
    if (!(cfg.probe.epsilon > 0.0)) {
        throw ValidationError("probe: epsilon must be positive");
    }
    if (cfg.probe.samples <= 0) {
        throw ValidationError("probe: samples must be positive");
    }
    if (!(cfg.probe.escape_radius > 0.0)) {
        throw ValidationError("probe: escape_radius must be positive");
    }
    if (!(cfg.scan.Pi_step > 0.0) || !(cfg.scan.P_step > 0.0)) {
        throw ValidationError("scan: steps must be positive");
    }
    if (cfg.scan.Pi_max < cfg.scan.Pi_min || cfg.scan.P_max < cfg.scan.P_min) {
        throw ValidationError("scan: max bounds must not be below min bounds");
    }
    if (!(cfg.tolerances.regularity > 0.0) || !(cfg.tolerances.boundary >= 0.0)) {
        throw ValidationError("tolerances: regularity > 0 and boundary >= 0 required");
    }
    if (!(cfg.tolerances.fd.metric > 0.0) || !(cfg.tolerances.fd.first > 0.0) ||
        !(cfg.tolerances.fd.second > 0.0)) {
        throw ValidationError("tolerances: finite-difference steps must be positive");
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

void emit(std::ostream& os, const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << key << " = " << buf << '\n';
}

}  // namespace

void write_config(std::ostream& os, const RunConfig& cfg) {
    os << "[params]\n";
    emit(os, "m1", cfg.params.m1);
    emit(os, "m2", cfg.params.m2);
    emit(os, "m3", cfg.params.m3);
    emit(os, "I1", cfg.params.I1);
    emit(os, "I2", cfg.params.I2);
    emit(os, "I3", cfg.params.I3);
    emit(os, "m", cfg.params.m);
    emit(os, "l", cfg.params.l);
    emit(os, "g", cfg.params.g);
    os << "\n[equilibrium]\n";
    emit(os, "Pi_e", cfg.equilibrium.Pi_e);
    emit(os, "P_e", cfg.equilibrium.P_e);
    os << "\n[integrator]\n";
    emit(os, "rel_tol", cfg.integrator.rel_tol);
    emit(os, "abs_tol", cfg.integrator.abs_tol);
    emit(os, "dt_init", cfg.integrator.dt_init);
    emit(os, "dt_min", cfg.integrator.dt_min);
    emit(os, "dt_max", cfg.integrator.dt_max);
    emit(os, "t_final", cfg.integrator.t_final);
    os << "max_steps = " << cfg.integrator.max_steps << '\n';
    os << "\n[probe]\n";
    os << "mode = " << to_string(cfg.probe.mode) << '\n';
    emit(os, "epsilon", cfg.probe.epsilon);
    os << "samples = " << cfg.probe.samples << '\n';
    os << "seed = " << cfg.probe.seed << '\n';
    emit(os, "escape_radius", cfg.probe.escape_radius);
    os << "\n[scan]\n";
    emit(os, "Pi_min", cfg.scan.Pi_min);
    emit(os, "Pi_max", cfg.scan.Pi_max);
    emit(os, "Pi_step", cfg.scan.Pi_step);
    emit(os, "P_min", cfg.scan.P_min);
    emit(os, "P_max", cfg.scan.P_max);
    emit(os, "P_step", cfg.scan.P_step);
    os << "\n[tolerances]\n";
    emit(os, "regularity", cfg.tolerances.regularity);
    emit(os, "boundary", cfg.tolerances.boundary);
    emit(os, "fd_metric", cfg.tolerances.fd.metric);
    emit(os, "fd_first", cfg.tolerances.fd.first);
    emit(os, "fd_second", cfg.tolerances.fd.second);
    if (!cfg.output.csv_path.empty() || !cfg.output.plot_data_path.empty()) {
        os << "\n[output]\n";
        if (!cfg.output.csv_path.empty()) {
            os << "csv_path = " << cfg.output.csv_path << '\n';
        }
        if (!cfg.output.plot_data_path.empty()) {
            os << "plot_data_path = " << cfg.output.plot_data_path << '\n';
        }
    }
}

}  // namespace leafstab
