#include "jetmech/selfcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "jetmech/action.hpp"
#include "jetmech/euler_lagrange.hpp"
#include "jetmech/expr.hpp"
#include "jetmech/integrate.hpp"
#include "jetmech/lagrangian.hpp"
#include "jetmech/potentials.hpp"

namespace jetmech {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

struct Runner {
    std::vector<CheckResult> results;

    void check(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
    }

    /// Runs fn and converts an exception into a failed check.
    template <typename Fn>
    void guarded(const std::string& name, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            check(name, false, std::string("exception: ") + e.what());
        }
    }
};

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// jet of the path r(t) = sin t carrying exact derivatives 0..order.
JetPoint sin_path_jet(double t, int order) {
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

JetPoint random_jet(std::mt19937_64& rng, int order) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> d(order + 1);
    for (double& v : d) v = u(rng);
    return JetPoint::scalar(0.0, std::move(d));
}

const std::vector<std::string> kProbeExpressions = {
    "r0^2*r1 - 0.5*r1^2",
    "exp(0.3*r0)*cos(r1)",
    "sqrt(r0^2 + 1)/(r1^2 + 2)",
    "ln(r0^2 + 1)*r2",
    "a*r0^2 + b*r1*r2",
};
const std::map<std::string, double> kProbeParams = {{"a", 1.3}, {"b", -0.7}};

double eval_at(const Expression& e, const JetPoint& jet) {
    Bindings b;
    b.params = kProbeParams;
    b.jet = &jet;
    return evaluate(e, b);
}

} // namespace

std::vector<CheckResult> run_selfchecks(unsigned long seed) {
    Runner r;
    std::mt19937_64 rng(seed);

    r.guarded("taylor.split-consistency", [&] {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const JetPoint jet = random_jet(rng, 4);
            const double dt1 = u(rng), dt2 = u(rng);
            const JetPoint whole = taylor_propagate(jet, dt1 + dt2, 4);
            const JetPoint split = taylor_propagate(taylor_propagate(jet, dt1, 4), dt2, 4);
            for (int n = 0; n <= 4; ++n)
                worst = std::max(worst, rel_err(split.deriv(n), whole.deriv(n)));
        }
        r.check("taylor.split-consistency", worst < 1e-12, "max rel err " + fmt(worst));
    });

    r.guarded("taylor.error-order", [&] {
        // local error of order-2 propagation on sin t falls as dt^3
        std::vector<double> lh, le;
        for (double dt = 1e-1; dt > 1.1e-3; dt /= 2) {
            double worst = 0.0;
            for (double t = 0.0; t < 3.0; t += 0.37) {
                const JetPoint pred = taylor_propagate(sin_path_jet(t, 2), dt, 2);
                worst = std::max(worst, std::abs(pred.deriv(0) - std::sin(t + dt)));
            }
            lh.push_back(std::log(dt));
            le.push_back(std::log(worst));
        }
        const double slope = linear_fit(lh, le).first;
        r.check("taylor.error-order", std::abs(slope - 3.0) < 0.2, "slope " + fmt(slope));
    });

    r.guarded("expr.derivative-linearity", [&] {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < kProbeExpressions.size(); ++i) {
            const Expression e1 = parse(kProbeExpressions[i]);
            const Expression e2 = parse(kProbeExpressions[i + 1]);
            const Expression combo = Expression::constant(1.7) * e1 + e2;
            for (const char* var : {"r0", "r1"}) {
                const VarRef v = VarRef::from_string(var);
                const Expression lhs = partial_derivative(combo, v);
                const Expression rhs =
                    Expression::constant(1.7) * partial_derivative(e1, v) +
                    partial_derivative(e2, v);
                for (int trial = 0; trial < 10; ++trial) {
                    const JetPoint jet = random_jet(rng, 3);
                    worst = std::max(worst, rel_err(eval_at(lhs, jet), eval_at(rhs, jet)));
                }
            }
        }
        r.check("expr.derivative-linearity", worst < 1e-10, "max rel err " + fmt(worst));
    });

    r.guarded("expr.derivative-commutation", [&] {
        double worst = 0.0;
        for (const std::string& text : kProbeExpressions) {
            const Expression e = parse(text);
            const Expression ab = partial_derivative(
                partial_derivative(e, VarRef::jet(0)), VarRef::jet(1));
            const Expression ba = partial_derivative(
                partial_derivative(e, VarRef::jet(1)), VarRef::jet(0));
            for (int trial = 0; trial < 20; ++trial) {
                const JetPoint jet = random_jet(rng, 3);
                worst = std::max(worst, rel_err(eval_at(ab, jet), eval_at(ba, jet)));
            }
        }
        r.check("expr.derivative-commutation", worst < 1e-10, "max rel err " + fmt(worst));
    });

    r.guarded("expr.partial-vs-finite-difference", [&] {
        double worst = 0.0;
        for (const std::string& text : kProbeExpressions) {
            const Expression e = parse(text);
            for (int order = 0; order <= 2; ++order) {
                const Expression de = partial_derivative(e, VarRef::jet(order));
                for (int trial = 0; trial < 20; ++trial) {
                    const JetPoint jet = random_jet(rng, 3);
                    const double x = jet.deriv(order);
                    const double h = 1e-6 * std::max(1.0, std::abs(x));
                    const double fd = (eval_at(e, jet.with_deriv(order, 0, x + h)) -
                                       eval_at(e, jet.with_deriv(order, 0, x - h))) /
                                      (2 * h);
                    worst = std::max(worst, rel_err(eval_at(de, jet), fd));
                }
            }
        }
        r.check("expr.partial-vs-finite-difference", worst < 1e-6, "max rel err " + fmt(worst));
    });

    r.guarded("expr.total-derivative-vs-finite-difference", [&] {
        std::uniform_real_distribution<double> ut(0.0, 3.0);
        double worst = 0.0;
        for (const std::string& text : kProbeExpressions) {
            const Expression e = parse(text);
            const Expression de = total_time_derivative(e, 2);
            for (int trial = 0; trial < 20; ++trial) {
                const double t = ut(rng);
                const double h = 1e-6;
                const double fd = (eval_at(e, sin_path_jet(t + h, 2)) -
                                   eval_at(e, sin_path_jet(t - h, 2))) /
                                  (2 * h);
                worst = std::max(worst, rel_err(eval_at(de, sin_path_jet(t, 3)), fd));
            }
        }
        r.check("expr.total-derivative-vs-finite-difference", worst < 1e-6,
                "max rel err " + fmt(worst));
    });

    r.guarded("lagrangian.quadratic-vs-expression", [&] {
        const LagrangianModel quad = LagrangianModel::quadratic({-0.5, 0.5, 0.25});
        const LagrangianModel expr =
            LagrangianModel::expression("-0.5*r0^2 + 0.5*r1^2 + 0.25*r2^2");
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const JetPoint jet = random_jet(rng, 4);
            worst = std::max(worst, rel_err(eval_lagrangian(quad, jet),
                                            eval_lagrangian(expr, jet)));
            for (int n = 0; n <= 2; ++n)
                worst = std::max(worst, rel_err(eval_at(partial_wrt_order(quad, n), jet),
                                                eval_at(partial_wrt_order(expr, n), jet)));
        }
        r.check("lagrangian.quadratic-vs-expression", worst < 1e-12,
                "max rel err " + fmt(worst));
    });

    r.guarded("lagrangian.energy-rank-total", [&] {
        const LagrangianModel energy = LagrangianModel::quadratic({1.0, 1.0, 1.0, 1.0});
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const JetPoint jet = random_jet(rng, 3);
            const EnergyRanks ranks = energy_ranks(energy, jet);
            double rank_sum = 0.0;
            for (double e : ranks.ranks) rank_sum += e;
            worst = std::max(worst, rel_err(rank_sum, eval_lagrangian(energy, jet)));
            worst = std::max(worst, rel_err(ranks.total, eval_lagrangian(energy, jet)));
        }
        r.check("lagrangian.energy-rank-total", worst < 1e-12, "max rel err " + fmt(worst));
    });

    const LagrangianModel harmonic = LagrangianModel::harmonic(1.0);
    const LagrangianModel pu = LagrangianModel::pais_uhlenbeck(1.0, 2.0);
    const double two_pi = 2 * M_PI;

    r.guarded("euler-lagrange.residual-on-solutions", [&] {
        const Trajectory t1 = integrate_eom(derive_eom(harmonic),
                                            JetPoint::scalar(0, {1.0, 0.0}), two_pi,
                                            IntegratorSpec::adaptive(1e-10));
        const Trajectory t2 = integrate_eom(derive_eom(pu),
                                            JetPoint::scalar(0, {1.0, 0.0, 0.0, 0.0}), two_pi,
                                            IntegratorSpec::adaptive(1e-10));
        const double worst = std::max(max_abs_el_residual(harmonic, t1),
                                      max_abs_el_residual(pu, t2));
        r.check("euler-lagrange.residual-on-solutions", worst < 1e-6,
                "max |residual| " + fmt(worst));
    });

    r.guarded("hamiltonian.convention-discrimination", [&] {
        const Trajectory traj = integrate_eom(derive_eom(harmonic),
                                              JetPoint::scalar(0, {1.0, 0.0}), 10 * two_pi,
                                              IntegratorSpec::adaptive(1e-10));
        const ConservationReport std_rep = conservation_report(traj, harmonic,
                                                               Convention::standard);
        const ConservationReport lit_rep = conservation_report(traj, harmonic,
                                                               Convention::literal);
        const bool ok = std_rep.max_abs_drift < 1e-8 && lit_rep.max_abs_drift > 1e-2 &&
                        std_rep.conserved && !lit_rep.conserved;
        r.check("hamiltonian.convention-discrimination", ok,
                "standard drift " + fmt(std_rep.max_abs_drift) + ", literal drift " +
                    fmt(lit_rep.max_abs_drift));
    });

    r.guarded("integrate.rk4-global-order", [&] {
        const EOMSystem sys = derive_eom(harmonic);
        std::vector<double> lh, le;
        for (double h : {0.1, 0.05, 0.025, 0.0125}) {
            const Trajectory traj = integrate_eom(sys, JetPoint::scalar(0, {1.0, 0.0}), two_pi,
                                                  IntegratorSpec::fixed(h));
            const double err = std::hypot(traj.samples.back().deriv(0) - 1.0,
                                          traj.samples.back().deriv(1));
            lh.push_back(std::log(h));
            le.push_back(std::log(err));
        }
        const double slope = linear_fit(lh, le).first;
        r.check("integrate.rk4-global-order", std::abs(slope - 4.0) < 0.2,
                "slope " + fmt(slope));
    });

    r.guarded("integrate.time-reversibility", [&] {
        const EOMSystem sys = derive_eom(pu);
        const JetPoint init = JetPoint::scalar(0, {1.0, 0.5, -0.25, 0.0});
        const IntegratorSpec spec = IntegratorSpec::adaptive(1e-10);
        const Trajectory fwd = integrate_eom(sys, init, two_pi, spec);
        const JetPoint turn = truncate_jet(fwd.samples.back(), 3);
        const Trajectory back = integrate_eom(sys, turn, 0.0, spec);
        double worst = 0.0;
        for (int n = 0; n < 4; ++n)
            worst = std::max(worst, std::abs(back.samples.front().deriv(n) - init.deriv(n)));
        r.check("integrate.time-reversibility", worst < 1e-6, "max err " + fmt(worst));
    });

    r.guarded("action.resample-refinement", [&] {
        const Trajectory traj = integrate_eom(derive_eom(harmonic),
                                              JetPoint::scalar(0, {1.0, 0.0}), two_pi,
                                              IntegratorSpec::adaptive(1e-10));
        const double coarse = action_integral(harmonic, traj, 1001);
        const double fine = action_integral(harmonic, traj, 2001);
        const double diff = std::abs(fine - coarse) / std::max(1.0, std::abs(fine));
        r.check("action.resample-refinement", diff < 1e-8, "refinement change " + fmt(diff));
    });

    r.guarded("action.free-particle-stationarity", [&] {
        const LagrangianModel free = LagrangianModel::quadratic({0.0, 0.5});
        Trajectory line;
        line.method = "analytic";
        const int n = 2001;
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            line.samples.push_back(JetPoint::scalar(t, {2.0 * t, 2.0, 0.0}));
        }
        BumpPerturbation bump;
        bump.t0 = 0.0;
        bump.t1 = 1.0;
        bump.exponent = 2;
        const StationarityReport rep = stationarity_test(free, line, bump);
        bool positive = true;
        for (double ds : rep.delta_s) positive = positive && ds > 0.0;
        // exact law: dS = eps^2 * integral of eta_dot^2 / 2
        double quad = 0.0;
        const int qn = 4000;
        for (int i = 0; i <= qn; ++i) {
            const double t = static_cast<double>(i) / qn;
            const double w = (i == 0 || i == qn) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            quad += w * 0.5 * bump.derivative(t, 1) * bump.derivative(t, 1);
        }
        quad *= (1.0 / qn) / 3.0;
        double law_err = 0.0;
        for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
            law_err = std::max(law_err,
                               rel_err(rep.delta_s[i], rep.epsilons[i] * rep.epsilons[i] * quad));
        const bool ok = rep.valid && positive && std::abs(rep.slope - 2.0) < 0.1 &&
                        law_err < 1e-6;
        r.check("action.free-particle-stationarity", ok,
                "slope " + fmt(rep.slope) + ", law rel err " + fmt(law_err));
    });

    r.guarded("potential.exponential-force-ratio", [&] {
        const PotentialModel p = PotentialModel::exponential(1.0, 1.0, 0.3);
        const PotentialModel newton = PotentialModel::newtonian(1.0, 1.0);
        double worst = 0.0;
        for (double rr : {0.5, 1.0, 1.7, 10.0}) {
            const double quotient = potential_force(p, rr) / potential_force(newton, rr);
            worst = std::max(worst, rel_err(quotient, std::exp(0.3 / rr)));
        }
        r.check("potential.exponential-force-ratio", worst < 1e-12,
                "max rel err " + fmt(worst));
    });

    r.guarded("potential.shifted-newtonian-limit", [&] {
        double worst_margin = 0.0;
        bool ok = true;
        for (double kr : {1e-6, 1e-8, 1e-10}) {
            const double rr = 1.0, k = kr;
            const PotentialModel p = PotentialModel::exponential(1.0, 1.0, k);
            const double phi = potential_value(p, rr);
            const double newton = 1.0 / rr;
            const double excess = std::abs(phi - newton) / newton;
            ok = ok && excess <= 0.6 * kr;
            worst_margin = std::max(worst_margin, excess / kr);
        }
        r.check("potential.shifted-newtonian-limit", ok,
                "excess/(k/r) max " + fmt(worst_margin) + " (bound 0.6)");
    });

    r.guarded("potential.series-divergence-scan", [&] {
        const double k = 1e-3;
        const PotentialModel p = PotentialModel::series(1.0, 1.0, k, {1.0});
        const SeriesDiagnostics diag =
            series_divergence_scan(p, {2 * k, k, k / 2}, 8);
        const bool ok = !diag.per_radius[0].divergent && diag.per_radius[0].monotone_decreasing &&
                        diag.per_radius[1].divergent && diag.per_radius[2].divergent &&
                        std::abs(diag.threshold_radius - k) < 1e-15;
        r.check("potential.series-divergence-scan", ok,
                std::string("classified ") + (ok ? "correctly" : "incorrectly"));
    });

    r.guarded("potential.series-matches-shifted-taylor", [&] {
        const double k = 1.0;
        const PotentialModel shifted = PotentialModel::exponential(1.0, 1.0, k);
        const PotentialModel series = PotentialModel::exponential_series(1.0, 1.0, k, 6);
        double worst_form = 0.0;
        for (double x : {0.1, 0.05, 0.01}) {
            const double rr = k / x;
            // same 6-term polynomial summed directly
            double poly = 0.0, xi = 1.0, fact = 1.0;
            for (int i = 1; i <= 6; ++i) {
                xi *= x;
                fact *= i;
                poly += xi / fact;
            }
            poly /= k;
            worst_form = std::max(worst_form,
                                  std::abs(potential_value(series, rr) - poly) / std::abs(poly));
        }
        // truncation against the full shifted exponential at k/r = 0.1
        const double trunc = std::abs(potential_value(series, k / 0.1) -
                                      potential_value(shifted, k / 0.1)) /
                             potential_value(shifted, k / 0.1);
        const bool ok = worst_form < 1e-10 && trunc < 1e-9;
        r.check("potential.series-matches-shifted-taylor", ok,
                "form rel err " + fmt(worst_form) + ", truncation " + fmt(trunc));
    });

    r.guarded("potential.laplacian-residual", [&] {
        const double harmonic_resid = laplacian_residual("1/r0", {}, 1.7);
        double worst = std::abs(harmonic_resid);
        for (double k : {1.0, 0.1, 0.01}) {
            const double rr = 2.0;
            const double got = laplacian_residual("exp(k/r0)", {{"k", k}}, rr);
            const double want = k * k / (rr * rr * rr * rr) * std::exp(k / rr);
            worst = std::max(worst, rel_err(got, want));
        }
        r.check("potential.laplacian-residual", worst < 1e-9, "max err " + fmt(worst));
    });

    r.guarded("orbit.newtonian-circular", [&] {
        const PotentialModel p = PotentialModel::newtonian(1.0, 1.0);
        const OrbitResult orbit = orbit_simulate(p, {1.0, 0.0}, {0.0, 1.0}, two_pi,
                                                 IntegratorSpec::adaptive(1e-10));
        const double variation = orbit.stats.apoapsis - orbit.stats.periapsis;
        const bool ok = !orbit.stats.aborted && orbit.stats.circular && variation < 1e-6;
        r.check("orbit.newtonian-circular", ok, "radius variation " + fmt(variation));
    });

    return r.results;
}

} // namespace jetmech
