#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rieszlab/cli_io.hpp"
#include "oracles.hpp"

using namespace rieszlab;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

SystemConfig open_loop_config(std::size_t N) {
    SystemConfig cfg;
    cfg.generator = GeneratorKind::SyntheticPolynomial;
    cfg.sector = SectorParams{2.0, 1.0, 1.0};
    cfg.N = N;
    cfg.b_law = PowerLaw{1.0, 2.0};
    cfg.f_law = PowerLaw{0.0, 2.0};
    // The zero feedback functional lies in every coefficient class, so the
    // declaration below keeps the class audit honest: beta + gamma >= alpha.
    cfg.gamma = 2.0;
    return cfg;
}

} // namespace

TEST_CASE("generate_synthetic: pinned spectrum, couplings and guard rails") {
    auto sys = generate_synthetic(2.0, 1.0, 3, PowerLaw{1.0, 2.0}, PowerLaw{0.5, 1.5}, 0.0, 0.0);
    REQUIRE(sys.size() == 3);
    CHECK(sys.modes[0].lambda == Complex(-1.0, 1.0));
    CHECK(sys.modes[1].lambda == Complex(-0.25, 2.0));
    CHECK(sys.modes[2].lambda.real() == doctest::Approx(-1.0 / 9.0).epsilon(1e-15));
    CHECK(sys.modes[2].lambda.imag() == 3.0);
    CHECK(sys.modes[1].b_coeff == Complex(0.25, 0.0));
    CHECK(sys.modes[1].f_coeff.real() == doctest::Approx(0.5 * std::pow(2.0, -1.5)));
    CHECK(sys.sector.alpha == 2.0);
    CHECK(sys.beta == 0.0);

    // Declared classes whose series diverge must be rejected up front.
    CHECK_THROWS_AS(generate_synthetic(2.0, 1.0, 10, PowerLaw{1.0, 1.0}, PowerLaw{0.0, 2.0},
                                       1.0, 0.0),
                    DivergentCoupling);
    CHECK_THROWS_AS(generate_synthetic(2.0, 1.0, 10, PowerLaw{0.0, 2.0}, PowerLaw{0.5, 0.75},
                                       0.0, 0.3),
                    DivergentCoupling);
    // ...but a zero scale never declares a class at all.
    CHECK_NOTHROW(generate_synthetic(2.0, 1.0, 10, PowerLaw{0.0, 0.0}, PowerLaw{0.0, 0.0},
                                     5.0, 5.0));

    CHECK_THROWS_AS(generate_synthetic(2.0, 1.0, 0, PowerLaw{1.0, 2.0}, PowerLaw{0.0, 2.0},
                                       0.0, 0.0),
                    EmptySystem);
    CHECK_THROWS_AS(generate_synthetic(0.0, 1.0, 5, PowerLaw{1.0, 2.0}, PowerLaw{0.0, 2.0},
                                       0.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("generate_synthetic: tail bounds dominate the numeric remainders tightly") {
    const std::size_t N = 10;
    auto sys = generate_synthetic(2.0, 1.0, N, PowerLaw{1.0, 2.0}, PowerLaw{0.0, 2.0}, 0.5, 0.0);

    // Numeric remainders of the infinite sums the bounds stand in for.
    double dnorm_partial = 0.0, l2_partial = 0.0, axis_partial = 0.0;
    for (std::size_t n = N + 1; n <= 200000; ++n) {
        const double nn = static_cast<double>(n);
        const double b_sq = std::pow(nn, -4.0);
        const double lam_sq = nn * nn + std::pow(nn, -4.0);
        dnorm_partial += b_sq * std::pow(lam_sq, 0.5);
        l2_partial += b_sq;
        axis_partial += b_sq * std::pow(nn, 2.0); // |Re lambda_n| = n^{-2}
    }

    REQUIRE(sys.tails.b_dnorm_sq.has_value());
    REQUIRE(sys.tails.b_l2_sq.has_value());
    REQUIRE(sys.tails.b_over_axis_gap.has_value());
    CHECK(*sys.tails.b_dnorm_sq >= dnorm_partial);
    CHECK(*sys.tails.b_dnorm_sq <= 1.2 * dnorm_partial);
    CHECK(*sys.tails.b_l2_sq >= l2_partial);
    CHECK(*sys.tails.b_l2_sq <= 1.2 * l2_partial);
    CHECK(*sys.tails.b_over_axis_gap >= axis_partial);
    CHECK(*sys.tails.b_over_axis_gap <= 1.2 * axis_partial);

    // Zero-scale feedback carries exact (zero) tails rather than unknowns.
    REQUIRE(sys.tails.f_l2_sq.has_value());
    CHECK(*sys.tails.f_l2_sq == 0.0);
    CHECK(*sys.tails.f_dnorm_sq == 0.0);
}

TEST_CASE("generate_wave: conjugate pairs, velocity coupling and zero tails") {
    auto sys = generate_wave(2, 1.0, 2.0, {0.7}, 1.0, 1.0);
    REQUIRE(sys.size() == 4);
    const double pi = M_PI;
    CHECK(sys.modes[0].lambda.real() == doctest::Approx(-1.0 / (pi * pi)).epsilon(1e-15));
    CHECK(sys.modes[0].lambda.imag() == pi);
    CHECK(sys.modes[1].lambda == std::conj(sys.modes[0].lambda));
    CHECK(sys.modes[2].lambda.imag() == 2.0 * pi);
    CHECK(sys.modes[2].lambda.real() ==
          doctest::Approx(-1.0 / std::pow(2.0 * pi, 2.0)).epsilon(1e-15));

    // b_{+-n} = -+ i b0_n / sqrt 2; pairs beyond the supplied series get zero.
    CHECK(sys.modes[0].b_coeff.real() == 0.0);
    CHECK(sys.modes[0].b_coeff.imag() == doctest::Approx(-0.7 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(sys.modes[1].b_coeff == -sys.modes[0].b_coeff);
    CHECK(sys.modes[2].b_coeff == Complex(0.0, 0.0));
    CHECK(sys.modes[3].b_coeff == Complex(0.0, 0.0));
    for (const auto& m : sys.modes) CHECK(m.f_coeff == Complex(0.0, 0.0));

    REQUIRE(sys.tails.b_l2_sq.has_value());
    CHECK(*sys.tails.b_l2_sq == 0.0);
    REQUIRE(sys.tails.f_over_axis_gap.has_value());
    CHECK(*sys.tails.f_over_axis_gap == 0.0);

    const auto audit = audit_assumptions(sys);
    CHECK(audit.structural_pass());
    CHECK(audit.a2_min_axis_distance ==
          doctest::Approx(1.0 / std::pow(2.0 * pi, 2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(generate_wave(1, 1.0, 2.0, {1.0, 2.0}, 0.0, 0.0), SizeMismatch);
    CHECK_THROWS_AS(generate_wave(0, 1.0, 2.0, {}, 0.0, 0.0), EmptySystem);
}

TEST_CASE("parse_config: canonical text is a round-trip fixed point") {
    const std::string rich = R"({
      "generator": "explicit",
      "sector": {"alpha": 1.5, "upsilon": 0.7, "omega": 2.0},
      "explicit_modes": [
        {"lambda": [-1.0, 2.0], "b": [0.5, -0.5], "f": 0.25},
        {"lambda": [-2.0, -3.0], "b": 1.0, "f": [0.0, 0.1]}
      ],
      "explicit_tails": {"b_l2_sq": 0.01, "f_l2_sq": 0.02, "b_dnorm_sq": 0.03,
                         "f_dnorm_sq": 0.04, "b_over_axis_gap": 0.05,
                         "f_over_axis_gap": null},
      "beta": 0.5, "gamma": 0.25,
      "feedback_source": "given",
      "given_f": [[0.1, 0.0], 0.2],
      "targets": [],
      "f2": {"scale": 0.1, "support": 3, "exponent": 1.5},
      "tau": 0.75, "tau_grid": [0.25, 0.5], "eps_floor": 0.4,
      "t_end": 500.0, "substeps": 3,
      "x0": {"law": "explicit", "coeffs": [[1.0, 0.0], [0.0, -1.0]], "normalize": false},
      "fit_window": [2.0, 100.0],
      "run_equivalence": true,
      "axis_w_min": 0.1, "axis_w_max": 50.0, "axis_points": 12,
      "probes": [[1.0, 5.0]],
      "circle_nodes": 64, "radii_levels": 5,
      "scan_delta": 0.3, "scan_nodes": 128, "exterior_count": 10,
      "out_dir": "zz", "write_csv": false, "seed": 42
    })";
    const SystemConfig cfg = parse_config_text(rich);
    CHECK(cfg.generator == GeneratorKind::Explicit);
    CHECK(cfg.explicit_modes.size() == 2);
    CHECK(cfg.explicit_modes[0].b_coeff == Complex(0.5, -0.5));
    CHECK(cfg.explicit_modes[1].f_coeff == Complex(0.0, 0.1)); // [re, im] form
    CHECK(cfg.given_f[1] == Complex(0.2, 0.0));                // bare-number form
    REQUIRE(cfg.explicit_tails.b_l2_sq.has_value());
    CHECK(*cfg.explicit_tails.b_l2_sq == 0.01);
    CHECK_FALSE(cfg.explicit_tails.f_over_axis_gap.has_value()); // null stays absent
    REQUIRE(cfg.f2.has_value());
    CHECK(cfg.f2->support == 3);
    REQUIRE(cfg.tau.has_value());
    CHECK(*cfg.tau == 0.75);
    REQUIRE(cfg.fit_window.has_value());
    CHECK(cfg.fit_window->second == 100.0);
    CHECK(cfg.x0.law == "explicit");
    CHECK_FALSE(cfg.x0.normalize);
    CHECK(cfg.seed == 42);
    CHECK(cfg.N == 100); // untouched keys keep their defaults

    const std::string once = cfg.canonical_text();
    const std::string twice = parse_config_text(once).canonical_text();
    CHECK(once == twice);

    // The default config is itself a fixed point.
    const SystemConfig def = parse_config_text("{}");
    CHECK(def.canonical_text() == parse_config_text(def.canonical_text()).canonical_text());
    CHECK(def.substeps == 4);
    CHECK(def.write_csv);
}

TEST_CASE("parse_config: malformed inputs are rejected with ConfigError") {
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"no_such_key\": 1}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"generator\": \"quantum\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"feedback_source\": \"psychic\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"sector\": {\"alfa\": 1.0}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"sector\": 3}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"N\": \"five\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"N\": -3}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"x0\": {\"law\": \"cauchy\"}}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"fit_window\": [1.0]}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"targets\": [[1.0]]}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"f2\": 7}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
}

TEST_CASE("config_hash: canonical-text hashing is semantic and stable") {
    const SystemConfig a = parse_config_text("{}");
    const SystemConfig b = parse_config_text("{\"N\": 100}"); // the default, spelled out
    const SystemConfig c = parse_config_text("{\"N\": 101}");
    const std::string ha = config_hash(a);
    CHECK(ha.size() == 16);
    CHECK(ha.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(ha == config_hash(b));
    CHECK(ha != config_hash(c));
    CHECK(ha == config_hash(parse_config_text(a.canonical_text())));
}

TEST_CASE("default_axis_grid: origin plus both half-axes, log spaced") {
    SystemConfig cfg;
    cfg.axis_w_min = 1.0;
    cfg.axis_w_max = 100.0;
    cfg.axis_points = 3;
    const auto grid = default_axis_grid(cfg);
    REQUIRE(grid.size() == 7);
    CHECK(grid[0] == 0.0);
    CHECK(grid[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(grid[2] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(grid[3] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(grid[4] == doctest::Approx(-10.0).epsilon(1e-14));
    CHECK(grid[5] == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(grid[6] == doctest::Approx(-100.0).epsilon(1e-14));

    cfg.axis_points = 1;
    CHECK_THROWS_AS(default_axis_grid(cfg), ConfigError);
    cfg.axis_points = 3;
    cfg.axis_w_min = 0.0;
    CHECK_THROWS_AS(default_axis_grid(cfg), ConfigError);
    cfg.axis_w_min = 2.0;
    cfg.axis_w_max = 1.0;
    CHECK_THROWS_AS(default_axis_grid(cfg), ConfigError);
}

TEST_CASE("build_system: declared sector, feedback sources and profiles") {
    {
        // The declared sector wins over the generation scale.
        SystemConfig cfg = open_loop_config(5);
        cfg.sector = SectorParams{2.0, 0.5, 1.0};
        cfg.upsilon_scale = 1.0;
        const auto built = build_system(cfg);
        CHECK(built.sys.sector.upsilon == 0.5);
        CHECK(built.sys.modes[0].lambda.real() == -1.0);
    }
    {
        // Given feedback is copied verbatim and length-checked.
        SystemConfig cfg = open_loop_config(3);
        cfg.feedback_source = FeedbackSource::Given;
        cfg.given_f = {Complex(0.1), Complex(0.0, 0.2), Complex(-0.3)};
        const auto built = build_system(cfg);
        CHECK(built.sys.modes[1].f_coeff == Complex(0.0, 0.2));
        cfg.given_f.pop_back();
        CHECK_THROWS_AS(build_system(cfg), SizeMismatch);
    }
    {
        // Designed feedback solves the unstable block in place.
        SystemConfig cfg;
        cfg.generator = GeneratorKind::Explicit;
        cfg.sector = SectorParams{1.0, 1.0, 1.0};
        cfg.explicit_modes = {ModeTriple{Complex(0.5, 0.0), Complex(1.0), Complex(0.0)},
                              ModeTriple{Complex(-1.0, 0.0), Complex(1.0), Complex(0.0)}};
        cfg.feedback_source = FeedbackSource::Designed;
        cfg.targets = {Complex(-1.0, 0.0)};
        const auto built = build_system(cfg);
        REQUIRE(built.design.indices == std::vector<std::size_t>{0});
        CHECK(built.sys.modes[0].f_coeff.real() == doctest::Approx(-1.5).epsilon(1e-12));
        CHECK(built.sys.modes[1].f_coeff == Complex(0.0, 0.0));
        CHECK(built.design.achieved[0].real() == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK_FALSE(built.design.ill_conditioned);
    }
    {
        // Designed on a fully stable family is a no-op with an empty design.
        SystemConfig cfg = open_loop_config(4);
        cfg.feedback_source = FeedbackSource::Designed;
        const auto built = build_system(cfg);
        CHECK(built.design.indices.empty());
        for (const auto& m : built.sys.modes) CHECK(m.f_coeff == Complex(0.0, 0.0));
    }
    {
        // Additive profile, per mode: scale (g+1)^{-exponent} on a prefix.
        SystemConfig cfg = open_loop_config(4);
        cfg.f2 = F2Config{2.0, 2, 1.0};
        const auto built = build_system(cfg);
        CHECK(built.sys.modes[0].f_coeff.real() == doctest::Approx(2.0));
        CHECK(built.sys.modes[1].f_coeff.real() == doctest::Approx(1.0));
        CHECK(built.sys.modes[2].f_coeff == Complex(0.0, 0.0));
        CHECK(built.sys.modes[3].f_coeff == Complex(0.0, 0.0));
    }
    {
        // Additive profile on a wave family goes per conjugate pair, and
        // support = 0 covers the whole truncation.
        SystemConfig cfg;
        cfg.generator = GeneratorKind::WavePerturbed;
        cfg.sector = SectorParams{2.0, 1.0, 1.0};
        cfg.N_pairs = 2;
        cfg.b0_coeffs = {1.0};
        cfg.f2 = F2Config{0.1, 1, 2.0};
        const auto built = build_system(cfg);
        CHECK(built.sys.modes[0].f_coeff.real() == doctest::Approx(0.1));
        CHECK(built.sys.modes[1].f_coeff.real() == doctest::Approx(0.1));
        CHECK(built.sys.modes[2].f_coeff == Complex(0.0, 0.0));

        cfg.f2 = F2Config{0.1, 0, 2.0};
        const auto full = build_system(cfg);
        CHECK(full.sys.modes[2].f_coeff.real() == doctest::Approx(0.1 * std::pow(2.0, -2.0)));
        CHECK(full.sys.modes[3].f_coeff.real() == doctest::Approx(0.1 * std::pow(2.0, -2.0)));
    }
}

TEST_CASE("build_system: initial-state laws") {
    {
        SystemConfig cfg = open_loop_config(3);
        cfg.x0.law = "power";
        cfg.x0.q = 1.5;
        cfg.x0.normalize = false;
        const auto built = build_system(cfg);
        CHECK(built.x0[0] == Complex(1.0, 0.0));
        CHECK(built.x0[1].real() == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
        CHECK(built.x0[2].real() == doctest::Approx(std::pow(3.0, -1.5)).epsilon(1e-15));
    }
    {
        SystemConfig cfg = open_loop_config(3);
        cfg.x0.law = "power_log";
        cfg.x0.q = 1.5;
        cfg.x0.s = 0.4;
        cfg.x0.normalize = false;
        const auto built = build_system(cfg);
        CHECK(built.x0[1].real() ==
              doctest::Approx(std::pow(2.0, -1.5) * std::pow(std::log(3.0), 0.4)).epsilon(1e-14));
    }
    {
        // Wave states are laid down per pair.
        SystemConfig cfg;
        cfg.generator = GeneratorKind::WavePerturbed;
        cfg.sector = SectorParams{2.0, 1.0, 1.0};
        cfg.N_pairs = 2;
        cfg.b0_coeffs = {1.0};
        cfg.x0.law = "power";
        cfg.x0.q = 1.0;
        cfg.x0.normalize = false;
        const auto built = build_system(cfg);
        REQUIRE(built.x0.size() == 4);
        CHECK(built.x0[0] == Complex(1.0, 0.0));
        CHECK(built.x0[1] == Complex(1.0, 0.0));
        CHECK(built.x0[2] == Complex(0.5, 0.0));
        CHECK(built.x0[3] == Complex(0.5, 0.0));
    }
    {
        SystemConfig cfg = open_loop_config(3);
        cfg.x0.normalize = true;
        const auto built = build_system(cfg);
        CHECK(state_norm(built.x0) == doctest::Approx(1.0).epsilon(1e-14));
    }
    {
        SystemConfig cfg = open_loop_config(3);
        cfg.x0.law = "explicit";
        cfg.x0.coeffs = {Complex(1.0), Complex(2.0)};
        CHECK_THROWS_AS(build_system(cfg), SizeMismatch);
        cfg.x0.coeffs = {Complex(0.0), Complex(0.0), Complex(0.0)};
        CHECK_THROWS_AS(build_system(cfg), ZeroNorms);
        cfg.x0.normalize = false;
        CHECK_NOTHROW(build_system(cfg));
    }
}

TEST_CASE("run_pipeline: open-loop certificates are exact and the run is deterministic") {
    SystemConfig cfg = open_loop_config(40);
    cfg.tau_grid = {0.4, 0.8};
    cfg.t_end = 200.0;
    cfg.substeps = 2;
    cfg.x0.law = "power";
    cfg.x0.q = 1.51;
    cfg.axis_points = 50;
    cfg.scan_delta = 0.5;
    cfg.scan_nodes = 128;
    cfg.radii_levels = 6;

    const RunReport rep = run_pipeline(cfg);
    CHECK(rep.audit_pass);
    CHECK(rep.ran_margins);
    CHECK(rep.continuous.eps_c == 1.0); // no feedback: |1 - G| is identically 1
    CHECK(rep.floor_used == 0.5);
    REQUIRE(rep.tau_scan.rows.size() == 2);
    for (const auto& row : rep.tau_scan.rows) {
        CHECK(row.eps_d == 1.0); // no feedback: |1 - H| is identically 1
        CHECK(row.nonresonant);
    }
    REQUIRE(rep.tau_scan.tau_star.has_value());
    CHECK(*rep.tau_scan.tau_star == 0.8);
    REQUIRE(rep.chosen_tau.has_value());
    CHECK(*rep.chosen_tau == 0.4);
    REQUIRE(rep.trajectory.has_value());
    CHECK(rep.trajectory->times.size() == 1001); // 500 periods, 2 substeps, final point
    REQUIRE(rep.fits.size() == 2);
    CHECK(rep.fits[0].model == DecayModel::PurePower);
    CHECK(rep.fits[1].model == DecayModel::PowerSqrtLog);
    CHECK_FALSE(rep.equivalence.has_value());
    REQUIRE(rep.scan.has_value());
    REQUIRE(rep.scan_adjoint.has_value());
    CHECK(rep.scan->rows.size() == 6);
    CHECK(rep.scan->rows[0].nodes == 128);
    CHECK(rep.tau_star_found);
    CHECK(rep.overall_pass);

    const RunReport again = run_pipeline(cfg);
    CHECK(rep.to_json().dump() == again.to_json().dump());
    CHECK(rep.config_hash == config_hash(cfg));
}

TEST_CASE("run_pipeline: structural audit failure stops before any margin work") {
    SystemConfig cfg;
    cfg.generator = GeneratorKind::Explicit;
    cfg.sector = SectorParams{1.0, 1.0, 1.0};
    cfg.explicit_modes = {ModeTriple{Complex(0.0, 3.0), Complex(1.0), Complex(0.0)},
                          ModeTriple{Complex(-1.0, 1.0), Complex(1.0), Complex(0.0)}};
    cfg.beta = 1.0;
    cfg.gamma = 0.0;
    cfg.tau_grid = {0.5};

    const RunReport rep = run_pipeline(cfg);
    CHECK_FALSE(rep.audit_pass);
    CHECK(rep.audit.a2 == Verdict::Fail); // eigenvalue on the imaginary axis
    CHECK_FALSE(rep.ran_margins);
    CHECK_FALSE(rep.tau_star_found);
    CHECK_FALSE(rep.overall_pass);
    CHECK_FALSE(rep.trajectory.has_value());
    CHECK(rep.fits.empty());

    const Json j = rep.to_json();
    CHECK(j["continuous_margin"].is_null());
    CHECK(j["trajectory"].is_null());
    CHECK(j["certificates"]["overall_pass"] == false);
}

TEST_CASE("run_pipeline: stage tags on genuine errors") {
    {
        SystemConfig cfg = open_loop_config(5);
        cfg.x0.law = "explicit";
        cfg.x0.coeffs = {Complex(1.0), Complex(1.0)}; // wrong length
        try {
            run_pipeline(cfg);
            FAIL("expected PipelineError");
        } catch (const PipelineError& e) {
            CHECK(e.stage == "build");
        }
    }
    {
        SystemConfig cfg = open_loop_config(3);
        cfg.tau = -1.0;
        cfg.axis_points = 2;
        try {
            run_pipeline(cfg);
            FAIL("expected PipelineError");
        } catch (const PipelineError& e) {
            CHECK(e.stage == "simulate");
        }
    }
    {
        SystemConfig cfg = open_loop_config(3);
        cfg.tau = 0.5;
        cfg.t_end = 50.0;
        cfg.substeps = 2;
        cfg.axis_points = 2;
        cfg.fit_window = std::make_pair(7.0, 7.0); // empty window
        try {
            run_pipeline(cfg);
            FAIL("expected PipelineError");
        } catch (const PipelineError& e) {
            CHECK(e.stage == "fit");
        }
    }
}

TEST_CASE("run_pipeline: explicit tau and fit window flow through to the fits") {
    SystemConfig cfg = open_loop_config(3);
    cfg.tau = 1.0;
    cfg.t_end = 100.0;
    cfg.substeps = 2;
    cfg.axis_points = 2;
    cfg.fit_window = std::make_pair(2.0, 50.0);
    cfg.run_equivalence = true;

    const RunReport rep = run_pipeline(cfg);
    REQUIRE(rep.chosen_tau.has_value());
    CHECK(*rep.chosen_tau == 1.0);
    CHECK(rep.trajectory->times.back() == 100.0);
    REQUIRE(rep.fits.size() == 2);
    CHECK(rep.fits[0].t_lo == 2.0);
    CHECK(rep.fits[0].t_hi == 50.0);
    CHECK(rep.equivalence.has_value());
    CHECK(rep.overall_pass); // empty tau grid: the audit alone certifies
}

TEST_CASE("trajectory csv: exact round trip and malformed-input rejection") {
    Trajectory traj;
    traj.times = {0.0, 0.5, 1.0, 2.0 / 3.0};
    traj.norms = {1.0, 0.25, 1e-17, 0.123456789012345678};
    const std::string path = temp_path("rieszlab_traj_roundtrip.csv");
    write_trajectory_csv(path, traj);
    const Trajectory back = read_trajectory_csv(path);
    REQUIRE(back.times.size() == traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(back.times[i] == traj.times[i]); // 17 significant digits round-trip
        CHECK(back.norms[i] == traj.norms[i]);
    }
    std::remove(path.c_str());

    const std::string bad_header = temp_path("rieszlab_traj_badheader.csv");
    {
        std::ofstream out(bad_header);
        out << "time;norm\n1.0;2.0\n";
    }
    CHECK_THROWS_AS(read_trajectory_csv(bad_header), ConfigError);
    std::remove(bad_header.c_str());

    const std::string bad_row = temp_path("rieszlab_traj_badrow.csv");
    {
        std::ofstream out(bad_row);
        out << "t,norm\n1.0,2.0\nthree,4\n";
    }
    CHECK_THROWS_AS(read_trajectory_csv(bad_row), ConfigError);
    std::remove(bad_row.c_str());

    CHECK_THROWS_AS(read_trajectory_csv(temp_path("rieszlab_no_such_file.csv")), ConfigError);
}

TEST_CASE("model_name: report spellings are pinned") {
    CHECK(std::string(model_name(DecayModel::PurePower)) == "power");
    CHECK(std::string(model_name(DecayModel::PowerSqrtLog)) == "power_sqrt_log");
}
