#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "leafstab/classifier.hpp"
#include "leafstab/simulator.hpp"

// Flat key=value run configuration with bracketed section headers and #
// comments. Unknown sections or keys are rejected, every field has a
// documented default, and a parsed config re-serializes to an equivalent
// file.

namespace leafstab {

struct ToleranceConfig {
    double regularity = 1e-8;
    double boundary = 1e-9;
    FdSteps fd;
};

struct OutputConfig {
    std::string csv_path;        // trajectory / scan CSV
    std::string plot_data_path;  // scan plot table (x, y, label code)
};

struct RunConfig {
    VehicleParams params;
    EquilibriumSpec equilibrium;
    IntegratorConfig integrator;
    ProbeConfig probe;
    ScanGrid scan;
    ToleranceConfig tolerances;
    OutputConfig output;
};

// Parses the text form. Throws ParseError (with the line number) on
// malformed lines, unknown sections, unknown keys, or unreadable values, and
// ValidationError when a parsed value violates a field invariant.
RunConfig parse_config_text(const std::string& text);

// Reads the file and parses it; file-open failure is a ValidationError.
RunConfig parse_config(const std::string& path);

// Writes a file that parses back to the same configuration.
void write_config(std::ostream& os, const RunConfig& cfg);

}  // namespace leafstab
