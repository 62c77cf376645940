#include <doctest.h>

#include <random>

#include "jetmech/lagrangian.hpp"
#include "oracles.hpp"

using namespace jetmech;

TEST_SUITE("lagrangian") {

TEST_CASE("quadratic evaluation") {
    const LagrangianModel free = LagrangianModel::quadratic({0.0, 0.5});
    CHECK(eval_lagrangian(free, JetPoint::scalar(0, {5.0, 2.0})) == 2.0);

    const LagrangianModel harmonic = LagrangianModel::quadratic({-0.5, 0.5});
    CHECK(eval_lagrangian(harmonic, JetPoint::scalar(0, {1.0, 0.0})) == -0.5);
}

TEST_CASE("expression evaluation with parameters") {
    const LagrangianModel L =
        LagrangianModel::expression("b*r1^2 - a*r0^2", {{"a", 1.0}, {"b", 1.0}});
    CHECK(eval_lagrangian(L, JetPoint::scalar(0, {1.0, 2.0})) == 3.0);
    CHECK(L.order() == 1);
    CHECK_THROWS_AS(LagrangianModel::expression("a*r0^2"), Error);   // unbound parameter
}

TEST_CASE("insufficient jet order is an error") {
    const LagrangianModel L = LagrangianModel::quadratic({1.0, 1.0, 1.0});
    CHECK_THROWS_AS(eval_lagrangian(L, JetPoint::scalar(0, {1.0, 1.0})), OrderError);
}

TEST_CASE("partial by order") {
    const LagrangianModel free = LagrangianModel::quadratic({0.0, 0.5});
    CHECK(render(partial_wrt_order(free, 1)) == "r1");

    const LagrangianModel abc = LagrangianModel::quadratic({1.0, 2.0, 3.0});
    CHECK(render(partial_wrt_order(abc, 2)) == "6*r2");
    CHECK(render(partial_wrt_order(abc, 5)) == "0");

    // expression model: evaluated partial matches finite differences
    const LagrangianModel L =
        LagrangianModel::expression("b*r1^2 - a*r0^2 + 0.1*r0^2*r1", {{"a", 1.0}, {"b", 0.5}});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int n = 0; n <= 1; ++n) {
        const Expression dn = partial_wrt_order(L, n);
        for (int trial = 0; trial < 20; ++trial) {
            const JetPoint jet = JetPoint::scalar(0, {u(rng), u(rng)});
            Bindings b;
            b.params = L.params();
            b.jet = &jet;
            const double x = jet.deriv(n);
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            const double fd = (eval_lagrangian(L, jet.with_deriv(n, 0, x + h)) -
                               eval_lagrangian(L, jet.with_deriv(n, 0, x - h))) /
                              (2 * h);
            CHECK(evaluate(dn, b) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("presets expand to the documented quadratic forms") {
    const LagrangianModel h = LagrangianModel::harmonic(2.0);
    CHECK(h.coeffs() == std::vector<double>{-2.0, 0.5});

    const LagrangianModel pu = LagrangianModel::pais_uhlenbeck(1.0, 2.0);
    CHECK(pu.coeffs() == std::vector<double>{2.0, -2.5, 0.5});
    CHECK(pu.order() == 2);
}

TEST_CASE("trailing zero coefficients reduce the order with a flag") {
    const LagrangianModel L = LagrangianModel::quadratic({-0.5, 0.5, 0.0, 0.0});
    CHECK(L.order() == 1);
    CHECK(L.order_reduced());
    CHECK_FALSE(LagrangianModel::quadratic({-0.5, 0.5}).order_reduced());
}

TEST_CASE("quadratic and equivalent expression models agree everywhere") {
    const LagrangianModel quad = LagrangianModel::quadratic({1.25, -0.75, 0.5});
    const LagrangianModel expr =
        LagrangianModel::expression("1.25*r0^2 - 0.75*r1^2 + 0.5*r2^2");
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const JetPoint jet = JetPoint::scalar(0, {u(rng), u(rng), u(rng)});
        CHECK(eval_lagrangian(quad, jet) ==
              doctest::Approx(eval_lagrangian(expr, jet)).epsilon(1e-12).scale(1.0));
        Bindings b;
        b.jet = &jet;
        for (int n = 0; n <= 2; ++n)
            CHECK(evaluate(partial_wrt_order(quad, n), b) ==
                  doctest::Approx(evaluate(partial_wrt_order(expr, n), b))
                      .epsilon(1e-12)
                      .scale(1.0));
    }
}

TEST_CASE("energy ranks pair successive orders") {
    const LagrangianModel e1 = LagrangianModel::quadratic({1.0, 1.0});
    const EnergyRanks r1 = energy_ranks(e1, JetPoint::scalar(0, {2.0, 3.0}));
    CHECK(r1.ranks.size() == 1);
    CHECK(r1.ranks[0] == 13.0);
    CHECK(r1.total == 13.0);

    const LagrangianModel e2 = LagrangianModel::quadratic({1.0, 1.0, 1.0, 1.0});
    const EnergyRanks r2 = energy_ranks(e2, JetPoint::scalar(0, {1.0, 1.0, 1.0, 1.0}));
    CHECK(r2.ranks == std::vector<double>{2.0, 2.0});
    CHECK(r2.total == 4.0);
    CHECK(r2.per_order == std::vector<double>{1.0, 1.0, 1.0, 1.0});

    const EnergyRanks zero = energy_ranks(e2, JetPoint::scalar(0, {0.0, 0.0, 0.0, 0.0}));
    for (double v : zero.ranks) CHECK(v == 0.0);
    CHECK(zero.total == 0.0);
}

TEST_CASE("rank total equals the quadratic form at random jets") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const LagrangianModel e = LagrangianModel::quadratic({0.5, 1.5, -0.25, 2.0, 1.0});
    for (int trial = 0; trial < 30; ++trial) {
        const JetPoint jet = JetPoint::scalar(0, {u(rng), u(rng), u(rng), u(rng), u(rng)});
        const EnergyRanks ranks = energy_ranks(e, jet);
        double sum = 0.0;
        for (double v : ranks.ranks) sum += v;
        CHECK(sum == doctest::Approx(eval_lagrangian(e, jet)).epsilon(1e-12).scale(1.0));
        CHECK(ranks.total ==
              doctest::Approx(eval_lagrangian(e, jet)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("multi-component quadratic sums over components") {
    const LagrangianModel L = LagrangianModel::quadratic({0.0, 0.5});
    const JetPoint jet(0.0, 2, std::vector<double>{0.0, 0.0, 3.0, 4.0});
    CHECK(eval_lagrangian(L, jet) == 12.5);   // (9 + 16)/2
}

} // TEST_SUITE
