#include <doctest.h>

#include "jetmech/config.hpp"

using namespace jetmech;

namespace {

const char* kHarmonicConfig = R"({
  "seed": 7,
  "lagrangian": {"kind": "quadratic", "coeffs": [-0.5, 0.5]},
  "integrator": {"method": "rk45", "relTol": 1e-10, "absTol": 1e-12, "tspan": [0.0, 6.0]},
  "initial": {"dim": 1, "derivs": [1.0, 0.0]},
  "output": {"directory": "out"}
})";

} // namespace

TEST_SUITE("config") {

TEST_CASE("well-formed config round trips through the getters") {
    RunConfig cfg = RunConfig::from_json_text(kHarmonicConfig);
    cfg.validate_schema();
    CHECK(cfg.seed() == 7);
    CHECK(cfg.dim() == 1);
    const LagrangianModel L = cfg.lagrangian();
    CHECK(L.is_quadratic());
    CHECK(L.coeffs() == std::vector<double>{-0.5, 0.5});
    const IntegratorSpec spec = cfg.integrator();
    CHECK(spec.method == IntegratorSpec::Method::rk45);
    CHECK(spec.rel_tol == 1e-10);
    CHECK(cfg.tspan() == std::pair<double, double>{0.0, 6.0});
    const JetPoint init = cfg.initial_jet();
    CHECK(init.deriv(0) == 1.0);
    CHECK(init.max_order() == 1);
    CHECK(cfg.output_path("trajectory", "trajectory.csv") == "out/trajectory.csv");
}

TEST_CASE("unknown keys are hard errors that name the key") {
    RunConfig cfg = RunConfig::from_json_text(
        R"({"lagragian": {"kind": "quadratic", "coeffs": [1.0]}})");
    try {
        cfg.validate_schema();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lagragian") != std::string::npos);
        CHECK(e.key == "lagragian");
    }

    RunConfig nested = RunConfig::from_json_text(
        R"({"integrator": {"method": "rk45", "reltol": 1e-8}})");
    try {
        nested.validate_schema();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "integrator.reltol");
    }
}

TEST_CASE("free-form parameter maps are exempt from the schema") {
    RunConfig cfg = RunConfig::from_json_text(
        R"({"lagrangian": {"kind": "expression", "expr": "a*r1^2", "params": {"a": 0.5}}})");
    CHECK_NOTHROW(cfg.validate_schema());
    CHECK(cfg.lagrangian().order() == 1);
}

TEST_CASE("dotted overrides apply after the file") {
    RunConfig cfg = RunConfig::from_json_text(kHarmonicConfig);
    cfg.apply_override("integrator.relTol=1e-6");
    cfg.apply_override("seed=99");
    cfg.validate_schema();
    CHECK(cfg.integrator().rel_tol == 1e-6);
    CHECK(cfg.seed() == 99);
    CHECK_THROWS_AS(cfg.apply_override("nonsense"), ConfigError);
}

TEST_CASE("invalid JSON and missing keys raise config errors") {
    CHECK_THROWS_AS(RunConfig::from_json_text("{not json"), ConfigError);
    RunConfig cfg = RunConfig::from_json_text(R"({"lagrangian": {"kind": "quadratic"}})");
    CHECK_THROWS_AS(cfg.lagrangian(), ConfigError);
    RunConfig cfg2 = RunConfig::from_json_text(R"({"lagrangian": {"kind": "spline"}})");
    CHECK_THROWS_AS(cfg2.lagrangian(), ConfigError);
}

TEST_CASE("expression lagrangian parse errors surface as config errors") {
    RunConfig cfg = RunConfig::from_json_text(
        R"({"lagrangian": {"kind": "expression", "expr": "b*(r1"}})");
    CHECK_THROWS_AS(cfg.lagrangian(), ConfigError);
}

TEST_CASE("presets are available as lagrangian kinds") {
    RunConfig h = RunConfig::from_json_text(
        R"({"lagrangian": {"kind": "harmonic", "omega": 2.0}})");
    CHECK(h.lagrangian().coeffs() == std::vector<double>{-2.0, 0.5});
    RunConfig pu = RunConfig::from_json_text(
        R"({"lagrangian": {"kind": "pais-uhlenbeck", "omega1": 1.0, "omega2": 2.0}})");
    CHECK(pu.lagrangian().order() == 2);
}

TEST_CASE("initial jet accepts nested rows for dim > 1") {
    RunConfig cfg = RunConfig::from_json_text(
        R"({"initial": {"dim": 2, "derivs": [[1.0, 0.0], [0.0, 0.8]]}})");
    const JetPoint jet = cfg.initial_jet();
    CHECK(jet.dim() == 2);
    CHECK(jet.deriv(1, 1) == 0.8);

    RunConfig bad = RunConfig::from_json_text(
        R"({"initial": {"dim": 2, "derivs": [1.0, 0.0]}})");
    CHECK_THROWS_AS(bad.initial_jet(), ConfigError);
}

TEST_CASE("potential section builds every model kind") {
    RunConfig newton = RunConfig::from_json_text(R"({"potential": {"kind": "newtonian"}})");
    CHECK(newton.potential().kind == PotentialModel::Kind::newtonian);

    RunConfig expo = RunConfig::from_json_text(
        R"({"potential": {"kind": "exponential", "k": 1e-3, "variant": "raw"}})");
    CHECK(expo.potential().variant == PotentialModel::Variant::raw);

    RunConfig series = RunConfig::from_json_text(
        R"({"potential": {"kind": "series", "k": 0.5, "coefficients": [1.0, 0.5]}})");
    CHECK(series.potential().coefficients.size() == 2);

    RunConfig bad = RunConfig::from_json_text(R"({"potential": {"kind": "yukawa"}})");
    CHECK_THROWS_AS(bad.potential(), ConfigError);
}

TEST_CASE("radius sweeps generate log or linear grids") {
    RunConfig cfg = RunConfig::from_json_text(
        R"({"potential": {"kind": "newtonian",
            "sweep": {"rmin": 1e-16, "rmax": 1e-13, "points": 4, "spacing": "log"}}})");
    const std::vector<double> radii = cfg.potential_radii();
    REQUIRE(radii.size() == 4);
    CHECK(radii.front() == doctest::Approx(1e-16).epsilon(1e-12));
    CHECK(radii.back() == doctest::Approx(1e-13).epsilon(1e-12));
    CHECK(radii[1] / radii[0] == doctest::Approx(10.0).epsilon(1e-9));

    RunConfig lin = RunConfig::from_json_text(
        R"({"potential": {"kind": "newtonian",
            "sweep": {"rmin": 1.0, "rmax": 2.0, "points": 3, "spacing": "linear"}}})");
    CHECK(lin.potential_radii()[1] == doctest::Approx(1.5).epsilon(1e-12));

    RunConfig explicit_radii = RunConfig::from_json_text(
        R"({"potential": {"kind": "newtonian", "radii": [1.0, 2.0]}})");
    CHECK(explicit_radii.potential_radii() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("atomic write replaces the target in one step") {
    const std::string path = "config_test_atomic.json";
    write_file_atomic(path, "first\n");
    write_file_atomic(path, "second\n");
    CHECK(read_file(path) == "second\n");
    std::remove(path.c_str());
}

} // TEST_SUITE
