#include <doctest.h>

#include <cmath>
#include <random>

#include "jetmech/expr.hpp"
#include "oracles.hpp"

using namespace jetmech;

namespace {

double eval_scalar(const Expression& e, const std::vector<double>& orders,
                   const std::map<std::string, double>& params = {}) {
    const JetPoint jet = JetPoint::scalar(0.0, orders);
    Bindings b;
    b.params = params;
    b.jet = &jet;
    return evaluate(e, b);
}

JetPoint sin_path(double t, int order) {
    std::vector<double> d(order + 1);
    for (int n = 0; n <= order; ++n) {
        switch (n % 4) {
            case 0: d[n] = std::sin(t); break;
            case 1: d[n] = std::cos(t); break;
            case 2: d[n] = -std::sin(t); break;
            default: d[n] = -std::cos(t); break;
        }
    }
    return JetPoint::scalar(t, std::move(d));
}

} // namespace

TEST_SUITE("expr") {

TEST_CASE("render/parse round trip is the identity on the tree") {
    for (const char* text : {
             "b*r1^2 - a*r0^2",
             "(G*M/k)*exp(k/r0)",
             "sin(r0)*cos(r1) + sqrt(r0^2 + 1)",
             "-r0^2 + 2*r1/(r2 - 3)",
             "ln(r0^2 + 1)*t - r1_y*r0_x",
             "1/(1 + exp(-r0))",
         }) {
        const Expression e = parse(text);
        const Expression again = parse(render(e));
        CAPTURE(text);
        CHECK(equal(e, again));
    }
}

TEST_CASE("syntax errors carry the byte offset") {
    try {
        parse("b*(r1");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 5);
    }
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("1 + "), ParseError);
    CHECK_THROWS_AS(parse("(r0))"), ParseError);
}

TEST_CASE("unknown function names are rejected") {
    try {
        parse("2*tan(r0)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("tan") != std::string::npos);
        CHECK(e.offset == 2);
    }
}

TEST_CASE("evaluation follows IEEE double semantics") {
    CHECK(eval_scalar(parse("r0^2"), {3.0}) == 9.0);
    CHECK(eval_scalar(parse("exp(k/r0)"), {1.0}, {{"k", 1.0}}) ==
          doctest::Approx(2.718281828459045).epsilon(1e-15));
    CHECK_THROWS_AS(eval_scalar(parse("1/r0"), {0.0}), DomainError);
    CHECK_THROWS_AS(eval_scalar(parse("ln(r0)"), {-1.0}), DomainError);
    CHECK_THROWS_AS(eval_scalar(parse("sqrt(r0)"), {-4.0}), DomainError);
    CHECK_THROWS_AS(eval_scalar(parse("a*r0"), {1.0}), Error);   // unbound parameter
}

TEST_CASE("precedence: ^ binds above unary minus, which binds above * /") {
    CHECK(eval_scalar(parse("-r0^2"), {2.0}) == -4.0);
    CHECK(eval_scalar(parse("2^-2"), {0.0}) == 0.25);
    CHECK(eval_scalar(parse("r0^2^3"), {2.0}) == 256.0);   // right-associative
    CHECK(eval_scalar(parse("6/2*3"), {0.0}) == 9.0);
    CHECK(eval_scalar(parse("1 - 2 - 3"), {0.0}) == -4.0);
}

TEST_CASE("the exponent must be constant") {
    CHECK_THROWS_AS(parse("r0^r1"), ParseError);
    CHECK_NOTHROW(parse("r0^(-2)"));
    CHECK_NOTHROW(parse("r0^1.5"));
}

TEST_CASE("power domain: negative base needs an integer exponent") {
    CHECK(eval_scalar(parse("r0^3"), {-2.0}) == -8.0);
    CHECK_THROWS_AS(eval_scalar(parse("r0^1.5"), {-2.0}), DomainError);
    CHECK_THROWS_AS(eval_scalar(parse("r0^(-1)"), {0.0}), DomainError);
}

TEST_CASE("simple partial derivatives simplify to readable forms") {
    CHECK(render(partial_derivative(parse("r1^2"), VarRef::from_string("r1"))) == "2*r1");
    CHECK(render(partial_derivative(parse("r0^2"), VarRef::from_string("r1"))) == "0");
    CHECK(render(partial_derivative(parse("a*r0"), VarRef::from_string("a"))) == "r0");
}

TEST_CASE("derivative of the exponential potential matches finite differences") {
    const Expression e = parse("exp(k/r0)");
    const Expression de = partial_derivative(e, VarRef::from_string("r0"));
    const std::map<std::string, double> params{{"k", 1.0}};
    const double got = eval_scalar(de, {2.0}, params);
    const double fd = oracles::central_fd(
        [&](double x) { return eval_scalar(e, {x}, params); }, 2.0);
    CHECK(got == doctest::Approx(fd).epsilon(1e-7));
    // closed form -k/r^2 exp(k/r)
    CHECK(got == doctest::Approx(-0.25 * std::exp(0.5)).epsilon(1e-14));
}

TEST_CASE("total time derivative applies the chain rule through jet variables") {
    CHECK(render(total_time_derivative(parse("r0^2"), 0)) == "2*r0*r1");
    CHECK(render(total_time_derivative(parse("r1^2"), 1)) == "2*r1*r2");

    // d2/dt2 (r0^2) = 2 r1^2 + 2 r0 r2, checked along r(t) = sin t at t = 0.7
    const Expression e = parse("r0^2");
    const Expression d2 = total_time_derivative(total_time_derivative(e, 0), 1);
    const JetPoint at = sin_path(0.7, 2);
    Bindings b;
    b.jet = &at;
    const double got = evaluate(d2, b);
    const double fd = oracles::second_central_fd(
        [](double t) { return std::sin(t) * std::sin(t); }, 0.7);
    CHECK(got == doctest::Approx(fd).epsilon(1e-6));
    CHECK(got == doctest::Approx(0.33993428580048207).epsilon(1e-14));   // 2 cos(1.4)
}

TEST_CASE("total derivative rejects orders above the stated maximum") {
    CHECK_THROWS_AS(total_time_derivative(parse("r3^2"), 2), OrderError);
}

TEST_CASE("differentiation is linear over + and constant scaling") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const std::vector<std::string> pool = {
        "r0^2*r1", "exp(0.2*r0)", "sin(r1)*r0", "sqrt(r0^2 + 2)", "r2/(r1^2 + 1)",
    };
    for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
        const Expression e1 = parse(pool[i]);
        const Expression e2 = parse(pool[i + 1]);
        const double c = u(rng);
        const Expression combo = Expression::constant(c) * e1 + e2;
        for (const char* var : {"r0", "r1", "r2"}) {
            const VarRef v = VarRef::from_string(var);
            const Expression lhs = partial_derivative(combo, v);
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<double> pt{u(rng), u(rng), u(rng)};
                const double want = c * eval_scalar(partial_derivative(e1, v), pt) +
                                    eval_scalar(partial_derivative(e2, v), pt);
                CHECK(eval_scalar(lhs, pt) ==
                      doctest::Approx(want).epsilon(1e-10).scale(1.0));
            }
        }
    }
}

TEST_CASE("partial derivatives commute as evaluated functions") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const std::vector<std::string> pool = {
        "r0^3*r1^2", "exp(0.3*r0)*cos(r1)", "ln(r0^2 + 1)*r1", "sqrt(r0^2 + r1^2 + 1)",
    };
    for (const std::string& text : pool) {
        const Expression e = parse(text);
        const Expression ab =
            partial_derivative(partial_derivative(e, VarRef::jet(0)), VarRef::jet(1));
        const Expression ba =
            partial_derivative(partial_derivative(e, VarRef::jet(1)), VarRef::jet(0));
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> pt{u(rng), u(rng)};
            const double x = eval_scalar(ab, pt), y = eval_scalar(ba, pt);
            CHECK(x == doctest::Approx(y).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("every symbolic partial agrees with central finite differences") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const std::vector<std::string> pool = {
        "r0^2*r1 - 0.5*r1^2", "exp(0.3*r0)*cos(r1)", "sqrt(r0^2 + 1)/(r1^2 + 2)",
        "ln(r0^2 + 1)*r2",    "a*r0^2 + b*r1*r2",
    };
    const std::map<std::string, double> params{{"a", 1.3}, {"b", -0.7}};
    for (const std::string& text : pool) {
        const Expression e = parse(text);
        for (int order = 0; order <= 2; ++order) {
            const Expression de = partial_derivative(e, VarRef::jet(order));
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> pt{u(rng), u(rng), u(rng)};
                const double x = pt[order];
                const double h = 1e-6 * std::max(1.0, std::abs(x));
                auto f = [&](double v) {
                    std::vector<double> q = pt;
                    q[order] = v;
                    return eval_scalar(e, q, params);
                };
                const double fd = (f(x + h) - f(x - h)) / (2 * h);
                CHECK(eval_scalar(de, pt, params) ==
                      doctest::Approx(fd).epsilon(1e-6).scale(1.0));
            }
        }
    }
}

TEST_CASE("component-suffixed jet variables bind per component") {
    const Expression e = parse("r0_x*r1_y - r0_y");
    const JetPoint jet(0.0, 2, std::vector<double>{1.0, 2.0, 3.0, 4.0});
    Bindings b;
    b.jet = &jet;
    CHECK(evaluate(e, b) == 1.0 * 4.0 - 2.0);
    // plain variables refuse multi-component jets
    Bindings b2;
    b2.jet = &jet;
    CHECK_THROWS_AS(evaluate(parse("r0"), b2), Error);
}

} // TEST_SUITE
