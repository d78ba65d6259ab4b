#include <doctest.h>

#include <sstream>

#include "leafstab/config.hpp"

using namespace leafstab;

TEST_CASE("empty document yields the reference defaults") {
    const RunConfig cfg = parse_config_text("");
    CHECK(cfg.params.m1 == 3.0);
    CHECK(cfg.params.m2 == 3.0);
    CHECK(cfg.params.m3 == 1.0);
    CHECK(cfg.params.I1 == 2.0);
    CHECK(cfg.params.I2 == 2.0);
    CHECK(cfg.params.I3 == 1.0);
    CHECK(cfg.params.m == 1.0);
    CHECK(cfg.params.l == 0.5);
    CHECK(cfg.params.g == 10.0);
    CHECK(cfg.equilibrium.Pi_e == 1.0);
    CHECK(cfg.equilibrium.P_e == 0.0);
    CHECK(cfg.integrator.rel_tol == 1e-10);
    CHECK(cfg.integrator.t_final == 100.0);
    CHECK(cfg.probe.mode == ProbeMode::FullSpace);
    CHECK(cfg.probe.samples == 20);
    CHECK(cfg.tolerances.regularity == 1e-8);
    CHECK(cfg.tolerances.boundary == 1e-9);
    CHECK(cfg.output.csv_path.empty());
}

TEST_CASE("bare keys ahead of any header set the physical parameters") {
    const RunConfig cfg = parse_config_text(
        "m1 = 3\nm2 = 3\nm3 = 1\nI1 = 2\nI2 = 2\nI3 = 1\nm = 1\nl = 0.5\n"
        "g = 10\n");
    CHECK(cfg.params.m1 == 3.0);
    CHECK(cfg.params.g == 10.0);
    CHECK(cfg.params.l == 0.5);
}

TEST_CASE("sections, comments and blank lines") {
    const RunConfig cfg = parse_config_text(
        "# leading comment\n"
        "\n"
        "[params]\n"
        "m1 = 4.5  # trailing comment\n"
        "\n"
        "[equilibrium]\n"
        "Pi_e = 2.5\n"
        "P_e = -1.25\n"
        "[integrator]\n"
        "t_final = 42\n"
        "max_steps = 1000\n"
        "[probe]\n"
        "mode = Leaf\n"
        "epsilon = 0.01\n"
        "samples = 7\n"
        "seed = 123\n"
        "[scan]\n"
        "Pi_max = 6\n"
        "[tolerances]\n"
        "boundary = 1e-7\n"
        "fd_second = 1e-3\n"
        "[output]\n"
        "csv_path = out/run.csv\n");
    CHECK(cfg.params.m1 == 4.5);
    CHECK(cfg.equilibrium.Pi_e == 2.5);
    CHECK(cfg.equilibrium.P_e == -1.25);
    CHECK(cfg.integrator.t_final == 42.0);
    CHECK(cfg.integrator.max_steps == 1000);
    CHECK(cfg.probe.mode == ProbeMode::Leaf);
    CHECK(cfg.probe.epsilon == 0.01);
    CHECK(cfg.probe.samples == 7);
    CHECK(cfg.probe.seed == 123);
    CHECK(cfg.scan.Pi_max == 6.0);
    CHECK(cfg.tolerances.boundary == 1e-7);
    CHECK(cfg.tolerances.fd.second == 1e-3);
    CHECK(cfg.output.csv_path == "out/run.csv");
}

TEST_CASE("later assignments win") {
    const RunConfig cfg = parse_config_text("m1 = 2\nm1 = 6\n");
    CHECK(cfg.params.m1 == 6.0);
}

TEST_CASE("parse failures carry the offending line") {
    try {
        (void)parse_config_text("m1 = 3\nm2 = 3\nnot a pair\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    try {
        (void)parse_config_text("[params]\nwhatever = 1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }

    CHECK_THROWS_AS((void)parse_config_text("[notasection]\n"), ParseError);
    CHECK_THROWS_AS((void)parse_config_text("[params\n"), ParseError);
    CHECK_THROWS_AS((void)parse_config_text("m1 = abc\n"), ParseError);
    CHECK_THROWS_AS((void)parse_config_text("m1 = 3x\n"), ParseError);
    CHECK_THROWS_AS(
        (void)parse_config_text("[integrator]\nmax_steps = 1.5\n"),
        ParseError);
    CHECK_THROWS_AS((void)parse_config_text("[probe]\nseed = -4\n"),
                    ParseError);
    CHECK_THROWS_AS((void)parse_config_text("[probe]\nmode = Sideways\n"),
                    ParseError);
    CHECK_THROWS_AS((void)parse_config_text("= 3\n"), ParseError);
}

TEST_CASE("field invariants are enforced after parsing") {
    CHECK_THROWS_AS((void)parse_config_text("l = -0.1\n"), ValidationError);
    CHECK_THROWS_AS((void)parse_config_text("m1 = 0\n"), ValidationError);
    CHECK_THROWS_AS(
        (void)parse_config_text("[integrator]\nrel_tol = -1e-8\n"),
        ValidationError);
    CHECK_THROWS_AS((void)parse_config_text("[probe]\nsamples = 0\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_config_text("[scan]\nPi_step = 0\n"),
                    ValidationError);
    CHECK_THROWS_AS(
        (void)parse_config_text("[scan]\nPi_min = 2\nPi_max = 1\n"),
        ValidationError);
}

TEST_CASE("missing file is a validation failure") {
    CHECK_THROWS_AS((void)parse_config("/no/such/file.ini"), ValidationError);
}

TEST_CASE("serialized configuration parses back identically") {
    RunConfig cfg;
    cfg.params.m1 = cfg.params.m2 = 2.75;
    cfg.params.l = 0.3;
    cfg.equilibrium = {2.0, -1.5};
    cfg.integrator.rel_tol = 1e-9;
    cfg.integrator.t_final = 7.5;
    cfg.integrator.max_steps = 123456;
    cfg.probe.mode = ProbeMode::Submanifold;
    cfg.probe.epsilon = 2e-3;
    cfg.probe.samples = 11;
    cfg.probe.seed = 987654321;
    cfg.probe.escape_radius = 0.25;
    cfg.scan = {0.25, 2.0, 0.25, -1.0, 1.0, 0.5};
    cfg.tolerances.regularity = 1e-7;
    cfg.tolerances.fd.metric = 2e-5;
    cfg.output.csv_path = "a.csv";
    cfg.output.plot_data_path = "b.csv";

    std::ostringstream os;
    write_config(os, cfg);
    const RunConfig back = parse_config_text(os.str());

    CHECK(back.params.m1 == cfg.params.m1);
    CHECK(back.params.l == cfg.params.l);
    CHECK(back.equilibrium.Pi_e == cfg.equilibrium.Pi_e);
    CHECK(back.equilibrium.P_e == cfg.equilibrium.P_e);
    CHECK(back.integrator.rel_tol == cfg.integrator.rel_tol);
    CHECK(back.integrator.t_final == cfg.integrator.t_final);
    CHECK(back.integrator.max_steps == cfg.integrator.max_steps);
    CHECK(back.probe.mode == cfg.probe.mode);
    CHECK(back.probe.epsilon == cfg.probe.epsilon);
    CHECK(back.probe.samples == cfg.probe.samples);
    CHECK(back.probe.seed == cfg.probe.seed);
    CHECK(back.probe.escape_radius == cfg.probe.escape_radius);
    CHECK(back.scan.Pi_min == cfg.scan.Pi_min);
    CHECK(back.scan.P_step == cfg.scan.P_step);
    CHECK(back.tolerances.regularity == cfg.tolerances.regularity);
    CHECK(back.tolerances.fd.metric == cfg.tolerances.fd.metric);
    CHECK(back.output.csv_path == cfg.output.csv_path);
    CHECK(back.output.plot_data_path == cfg.output.plot_data_path);
}

TEST_CASE("round trip through text is stable") {
    const RunConfig first = parse_config_text("m1 = 3.5\nm2 = 3.5\n");
    std::ostringstream os1;
    write_config(os1, first);
    const RunConfig second = parse_config_text(os1.str());
    std::ostringstream os2;
    write_config(os2, second);
    CHECK(os1.str() == os2.str());
}
