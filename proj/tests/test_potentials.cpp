#include <doctest.h>

#include <cmath>
#include <random>

#include "jetmech/potentials.hpp"
#include "oracles.hpp"

using namespace jetmech;

TEST_SUITE("potentials") {

TEST_CASE("potential values") {
    CHECK(potential_value(PotentialModel::newtonian(1.0, 1.0), 2.0) == 0.5);

    // shifted exponential at k/r = 1e-3: (1/k)(e^(k/r) - 1)
    const PotentialModel shifted = PotentialModel::exponential(1.0, 1.0, 1e-3);
    CHECK(potential_value(shifted, 1.0) ==
          doctest::Approx(1.0005001667083417).epsilon(1e-12));
    // relative excess over 1/r is k/(2r) to leading order
    CHECK(potential_value(shifted, 1.0) - 1.0 == doctest::Approx(5e-4).epsilon(1e-3));

    // series with the single coefficient 1/k is exactly G*M/r at every radius
    const PotentialModel unit = PotentialModel::series(2.0, 3.0, 0.37, {1.0 / 0.37});
    for (double r : {0.1, 1.0, 7.3}) {
        CHECK(potential_value(unit, r) == doctest::Approx(6.0 / r).epsilon(1e-15));
    }
}

TEST_CASE("raw and shifted variants differ by exactly G*M/k") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double k = u(rng);
        const double r = std::max(u(rng), 0.5 * k);   // keep exp(k/r) of modest size
        const PotentialModel raw =
            PotentialModel::exponential(1.5, 2.0, k, PotentialModel::Variant::raw);
        const PotentialModel shifted = PotentialModel::exponential(1.5, 2.0, k);
        const double diff = potential_value(raw, r) - potential_value(shifted, r);
        CHECK(diff == doctest::Approx(3.0 / k).epsilon(1e-12));
        CHECK(potential_force(raw, r) ==
              doctest::Approx(potential_force(shifted, r)).epsilon(1e-15));
    }
}

TEST_CASE("forces are the closed-form radial derivatives") {
    CHECK(potential_force(PotentialModel::newtonian(1.0, 1.0), 2.0) == 0.25);
    CHECK(potential_force(PotentialModel::exponential(1.0, 1.0, 1.0), 1.0) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-15));

    const PotentialModel p = PotentialModel::exponential(1.0, 1.0, 0.3);
    const double fd = -oracles::central_fd(
        [&](double r) { return potential_value(p, r); }, 1.7, 1e-6);
    CHECK(potential_force(p, 1.7) == doctest::Approx(fd).epsilon(1e-8));

    const PotentialModel series = PotentialModel::series(1.0, 1.0, 0.5, {1.0, 0.5, 0.25});
    const double fd2 = -oracles::central_fd(
        [&](double r) { return potential_value(series, r); }, 1.3, 1e-6);
    CHECK(potential_force(series, 1.3) == doctest::Approx(fd2).epsilon(1e-8));
}

TEST_CASE("non-positive radii are domain errors") {
    const PotentialModel p = PotentialModel::newtonian(1.0, 1.0);
    CHECK_THROWS_AS(potential_value(p, 0.0), DomainError);
    CHECK_THROWS_AS(potential_value(p, -1.0), DomainError);
    CHECK_THROWS_AS(potential_force(p, 0.0), DomainError);
}

TEST_CASE("newtonian comparison covers the regime ladder") {
    SUBCASE("planck-scale k against an atomic radius is newtonian") {
        const PotentialModel p = PotentialModel::exponential(6.674e-11, 1.0, 1e-35);
        const ComparisonRow row = newtonian_comparison(p, {1e-10}).front();
        CHECK(row.ratio == 1.0);   // exp(1e-25) rounds to 1 in double
        CHECK(row.ratio_excess == doctest::Approx(1e-25).epsilon(1e-12));
        CHECK(row.regime == "newtonian-limit");
    }
    SUBCASE("nuclear-scale k at nuclear distance gives ratio e") {
        const PotentialModel p = PotentialModel::exponential(6.674e-11, 1.0, 1e-15);
        const ComparisonRow row = newtonian_comparison(p, {1e-15}).front();
        CHECK(row.ratio == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
        CHECK(row.regime == "intermediate");
    }
    SUBCASE("one decade below k the force ratio is e^10") {
        const PotentialModel p = PotentialModel::exponential(6.674e-11, 1.0, 1e-15);
        const ComparisonRow row = newtonian_comparison(p, {1e-16}).front();
        CHECK(row.ratio == doctest::Approx(22026.465794806718).epsilon(1e-12));
        CHECK(row.regime == "strong");
    }
}

TEST_CASE("exponential force ratio equals exp(k/r) exactly") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double k = u(rng), r = u(rng);
        const PotentialModel model = PotentialModel::exponential(1.0, 1.0, k);
        const PotentialModel newton = PotentialModel::newtonian(1.0, 1.0);
        const double quotient = potential_force(model, r) / potential_force(newton, r);
        CHECK(quotient == doctest::Approx(std::exp(k / r)).epsilon(1e-12));
    }
}

TEST_CASE("series divergence scan classifies the unit-coefficient cases") {
    const double k = 2.5;
    const PotentialModel p = PotentialModel::series(1.0, 1.0, k, {1, 1, 1, 1, 1, 1, 1, 1});
    const SeriesDiagnostics diag = series_divergence_scan(p, {2 * k, k, k / 2}, 8);

    const SeriesRadiusDiagnostics& convergent = diag.per_radius[0];
    CHECK_FALSE(convergent.divergent);
    CHECK(convergent.monotone_decreasing);
    CHECK(convergent.term_magnitudes[1] ==
          doctest::Approx(convergent.term_magnitudes[0] / 2).epsilon(1e-14));

    const SeriesRadiusDiagnostics& marginal = diag.per_radius[1];
    CHECK(marginal.divergent);
    CHECK_FALSE(marginal.monotone_decreasing);
    CHECK(marginal.term_magnitudes[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(marginal.term_magnitudes[7] == doctest::Approx(1.0).epsilon(1e-14));

    const SeriesRadiusDiagnostics& divergent = diag.per_radius[2];
    CHECK(divergent.divergent);
    // terms double and the partial sums grow monotonically
    for (std::size_t i = 0; i + 1 < divergent.term_magnitudes.size(); ++i) {
        CHECK(divergent.term_magnitudes[i + 1] ==
              doctest::Approx(2 * divergent.term_magnitudes[i]).epsilon(1e-14));
        CHECK(divergent.partial_sums[i + 1] > divergent.partial_sums[i]);
    }
    CHECK(diag.threshold_radius == doctest::Approx(k).epsilon(1e-14));
}

TEST_CASE("divergence flag fires whenever term magnitudes stop decreasing") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> uc(0.1, 2.0);
    std::uniform_real_distribution<double> ur(0.5, 4.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> coeffs(6);
        for (double& c : coeffs) c = uc(rng);
        const PotentialModel p = PotentialModel::series(1.0, 1.0, 1.0, coeffs);
        const double r = ur(rng);
        const SeriesRadiusDiagnostics d =
            series_divergence_scan(p, {r}, 6).per_radius.front();
        bool non_decreasing = false;
        for (std::size_t i = 0; i + 1 < d.term_magnitudes.size(); ++i)
            non_decreasing =
                non_decreasing || d.term_magnitudes[i + 1] >= d.term_magnitudes[i];
        CHECK(d.divergent == non_decreasing);
    }
}

TEST_CASE("six shifted-exponential taylor coefficients reproduce the series form") {
    const double k = 1.0;
    const PotentialModel series = PotentialModel::exponential_series(1.0, 1.0, k, 6);
    for (double x : {0.1, 0.05, 0.01}) {
        // independent evaluation of the same truncated polynomial
        double poly = 0.0, xi = 1.0, fact = 1.0;
        for (int i = 1; i <= 6; ++i) {
            xi *= x;
            fact *= i;
            poly += xi / fact;
        }
        poly /= k;
        CHECK(potential_value(series, k / x) == doctest::Approx(poly).epsilon(1e-10));
    }
    // truncation floor against the full shifted exponential
    const PotentialModel shifted = PotentialModel::exponential(1.0, 1.0, k);
    const double rel01 = std::abs(potential_value(series, k / 0.1) -
                                  potential_value(shifted, k / 0.1)) /
                         potential_value(shifted, k / 0.1);
    CHECK(rel01 < 2.5e-10);   // 6-term remainder at k/r = 0.1
    const double rel005 = std::abs(potential_value(series, k / 0.05) -
                                   potential_value(shifted, k / 0.05)) /
                          potential_value(shifted, k / 0.05);
    CHECK(rel005 < 1e-10);
}

TEST_CASE("radial laplacian of 1/r vanishes and of exp(k/r) is (k^2/r^4) e^(k/r)") {
    CHECK(laplacian_residual("1/r0", {}, 2.0) == 0.0);
    CHECK(laplacian_residual("1/r0", {}, 0.37) ==
          doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

    const double got = laplacian_residual("exp(k/r0)", {{"k", 1.0}}, 2.0);
    CHECK(got == doctest::Approx(0.10304507941875801).epsilon(1e-12));   // e^0.5 / 16

    // second-order finite-difference cross-check of the radial laplacian
    auto phi = [](double r) { return std::exp(1.0 / r); };
    const double h = 1e-4, r = 2.0;
    const double fd_lap = oracles::second_central_fd(phi, r, h) +
                          (phi(r + h) - phi(r - h)) / (2 * h) * 2.0 / r;
    CHECK(got == doctest::Approx(fd_lap).epsilon(1e-6));

    CHECK_THROWS_AS(laplacian_residual("exp(k/r0)", {{"k", 1.0}}, -1.0), DomainError);
}

TEST_CASE("laplacian residual of exp(k/r) scales as k^2 for small k") {
    const double r = 1.7;
    const double r1 = laplacian_residual("exp(k/r0)", {{"k", 1e-2}}, r);
    const double r2 = laplacian_residual("exp(k/r0)", {{"k", 1e-3}}, r);
    CHECK(r1 / r2 == doctest::Approx(100.0).epsilon(1e-2));
}

TEST_CASE("newtonian circular orbit stays circular") {
    const PotentialModel p = PotentialModel::newtonian(1.0, 1.0);
    const OrbitResult orbit = orbit_simulate(p, {1.0, 0.0}, {0.0, 1.0}, 2 * M_PI,
                                             IntegratorSpec::adaptive(1e-10));
    CHECK_FALSE(orbit.stats.aborted);
    CHECK(orbit.stats.circular);
    CHECK(orbit.stats.apoapsis - orbit.stats.periapsis < 1e-6);
    CHECK(orbit.stats.advance_per_orbit == 0.0);
    CHECK(orbit.stats.radial_period == doctest::Approx(2 * M_PI).epsilon(1e-6));
}

TEST_CASE("newtonian eccentric orbit closes") {
    const PotentialModel p = PotentialModel::newtonian(1.0, 1.0);
    // start at apoapsis r = 1 with sub-circular tangential speed: e = 0.3
    const double v = std::sqrt(0.7);
    const OrbitResult orbit =
        orbit_simulate(p, {1.0, 0.0}, {0.0, v}, 30.0, IntegratorSpec::adaptive(1e-10));
    CHECK_FALSE(orbit.stats.aborted);
    CHECK_FALSE(orbit.stats.circular);
    CHECK(orbit.stats.periapsis_passages >= 2);
    CHECK(std::abs(orbit.stats.advance_per_orbit) < 1e-3);
    CHECK(orbit.stats.periapsis == doctest::Approx(0.7 / 1.3).epsilon(1e-5));
    CHECK(orbit.stats.apoapsis == doctest::Approx(1.0).epsilon(1e-5));
    // conservation diagnostics
    CHECK(orbit.stats.energy_drift < 1e-7);
    CHECK(orbit.stats.angular_momentum_drift < 1e-9);
}

TEST_CASE("exponential correction precesses, fading as k shrinks") {
    const double v = std::sqrt(0.7);
    std::vector<double> advances;
    for (double k : {1e-2, 1e-3, 1e-4}) {
        const PotentialModel p = PotentialModel::exponential(1.0, 1.0, k);
        const OrbitResult orbit =
            orbit_simulate(p, {1.0, 0.0}, {0.0, v}, 30.0, IntegratorSpec::adaptive(1e-11));
        REQUIRE_FALSE(orbit.stats.aborted);
        REQUIRE(orbit.stats.periapsis_passages >= 2);
        advances.push_back(std::abs(orbit.stats.advance_per_orbit));
    }
    CHECK(advances[0] > 0.0);
    CHECK(advances[0] > advances[1]);
    CHECK(advances[1] > advances[2]);
    CHECK(advances[2] > 0.0);
}

TEST_CASE("radial infall trips the collision guard") {
    const PotentialModel p = PotentialModel::newtonian(1.0, 1.0);
    const OrbitResult orbit =
        orbit_simulate(p, {1.0, 0.0}, {-2.0, 0.0}, 1.0, IntegratorSpec::adaptive(1e-8));
    CHECK(orbit.stats.aborted);
    CHECK(orbit.trajectory.samples.size() > 1);   // partial results retained
}

} // TEST_SUITE
