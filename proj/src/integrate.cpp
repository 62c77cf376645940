#include "jetmech/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace jetmech {

IntegratorSpec IntegratorSpec::fixed(double step) {
    IntegratorSpec s;
    s.method = Method::rk4;
    s.step = step;
    return s;
}

IntegratorSpec IntegratorSpec::adaptive(double rel_tol, double abs_tol) {
    IntegratorSpec s;
    s.method = Method::rk45;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    return s;
}

namespace {

void check_spec(const IntegratorSpec& spec) {
    if (spec.max_steps < 1) throw Error("max_steps must be >= 1");
    if (spec.method == IntegratorSpec::Method::rk4) {
        if (!(spec.step > 0)) throw Error("fixed step must be positive");
    } else {
        if (!(spec.rel_tol > 0) || !(spec.abs_tol > 0))
            throw Error("tolerances must be positive");
    }
}

void rk4_stage(const OdeRhs& f, double t, double h, const std::vector<double>& y,
               std::vector<double>& out, std::vector<double>& k1, std::vector<double>& k2,
               std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t n = y.size();
    f(t, y.data(), k1.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

} // namespace

OdeSolution integrate_ode(const OdeRhs& f, int n, std::vector<double> y0, double t0, double t1,
                          const IntegratorSpec& spec,
                          const std::function<bool(double, const double*)>& guard,
                          bool* aborted) {
    check_spec(spec);
    if (t1 == t0) throw Error("integration span is empty");
    if (static_cast<int>(y0.size()) != n) throw Error("state size mismatch");
    if (aborted) *aborted = false;

    OdeSolution sol;
    sol.times.push_back(t0);
    sol.states.push_back(y0);

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    if (spec.method == IntegratorSpec::Method::rk4) {
        long nsteps = static_cast<long>(std::ceil(span / spec.step - 1e-12));
        nsteps = std::max<long>(nsteps, 1);
        if (nsteps > spec.max_steps)
            throw ConvergenceError("fixed-step run needs " + std::to_string(nsteps) +
                                   " steps, above max_steps");
        const double h = dir * span / nsteps;
        std::vector<double> y = std::move(y0), ynew(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
        for (long i = 0; i < nsteps; ++i) {
            const double t = t0 + i * h;
            rk4_stage(f, t, h, y, ynew, k1, k2, k3, k4, tmp);
            const double t_next = (i + 1 == nsteps) ? t1 : t0 + (i + 1) * h;
            if (guard && !guard(t_next, ynew.data())) {
                if (aborted) *aborted = true;
                return sol;
            }
            y = ynew;
            sol.times.push_back(t_next);
            sol.states.push_back(y);
            ++sol.accepted;
        }
        return sol;
    }

    // adaptive Dormand-Prince with standard proportional control
    std::vector<double> y = std::move(y0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    double t = t0;
    double h = dir * span / 100.0;   // crude start; the controller adapts fast
    const double h_min = span * 1e-14;
    bool have_k1 = false;

    for (long step_count = 0; t != t1; ++step_count) {
        // a guarded run that can no longer advance returns its partial results
        if (step_count >= spec.max_steps) {
            if (guard && aborted) {
                *aborted = true;
                return sol;
            }
            throw ConvergenceError("adaptive integration exceeded max_steps");
        }
        if (std::abs(h) < h_min) {
            if (guard && aborted) {
                *aborted = true;
                return sol;
            }
            throw ConvergenceError("adaptive step size underflow at t = " + std::to_string(t));
        }
        bool landing = false;
        if (dir * (t + h - t1) >= 0) {   // final step: land on t1 exactly
            h = t1 - t;
            landing = true;
        }

        if (!have_k1) {
            f(t, y.data(), k1.data());
            have_k1 = true;
        }
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * A21 * k1[i];
        f(t + C2 * h, ytmp.data(), k2.data());
        for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        f(t + C3 * h, ytmp.data(), k3.data());
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        f(t + C4 * h, ytmp.data(), k4.data());
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        f(t + C5 * h, ytmp.data(), k5.data());
        for (int i = 0; i < n; ++i)
            ytmp[i] = y[i] +
                      h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        f(t + h, ytmp.data(), k6.data());
        for (int i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        f(t + h, ynew.data(), k7.data());

        double err_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                  E6 * k6[i] + E7 * k7[i]);
            const double sc =
                spec.abs_tol + spec.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err_sq += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(err_sq / n);
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-300), -0.2), 0.2, 5.0);

        if (err <= 1.0) {
            t = landing ? t1 : t + h;
            if (guard && !guard(t, ynew.data())) {
                if (aborted) *aborted = true;
                return sol;
            }
            y.swap(ynew);
            k1.swap(k7);   // FSAL
            sol.times.push_back(t);
            sol.states.push_back(y);
            ++sol.accepted;
            h *= factor;
        } else {
            ++sol.rejected;
            h *= factor;
            // k1 unchanged; retry from the same point
        }
    }
    return sol;
}

Trajectory integrate_eom(const EOMSystem& sys, const JetPoint& init, double t1,
                         const IntegratorSpec& spec) {
    if (t1 == init.t()) throw Error("integration span is empty");
    EOMSystem::SolveScratch scratch;
    std::vector<double> y0 = sys.jet_to_state(init);
    const OdeRhs f = [&sys, &scratch](double t, const double* y, double* dydt) {
        sys.rhs(t, y, dydt, &scratch);
    };
    OdeSolution sol = integrate_ode(f, sys.state_dim(), std::move(y0), init.t(), t1, spec);

    Trajectory traj;
    traj.method = spec.method == IntegratorSpec::Method::rk4 ? "rk4" : "rk45";
    traj.accepted = sol.accepted;
    traj.rejected = sol.rejected;
    traj.samples.reserve(sol.times.size());
    EOMSystem::SolveScratch jet_scratch;
    for (std::size_t i = 0; i < sol.times.size(); ++i)
        traj.samples.push_back(sys.state_to_jet(sol.times[i], sol.states[i].data(), &jet_scratch));
    if (t1 < init.t()) {
        // keep the sample order strictly increasing in t
        std::reverse(traj.samples.begin(), traj.samples.end());
    }
    return traj;
}

ConservationReport conservation_report(const Trajectory& traj, const LagrangianModel& L,
                                       Convention convention) {
    validate(traj);
    if (traj.samples.size() < 2)
        throw Error("conservation report needs at least 2 samples");
    ConservationReport rep;
    rep.quantity = convention == Convention::standard ? "hamiltonian.standard"
                                                      : "hamiltonian.literal";
    rep.initial = generalized_hamiltonian(L, traj.samples.front(), convention);
    for (const JetPoint& s : traj.samples) {
        const double h = generalized_hamiltonian(L, s, convention);
        rep.max_abs_drift = std::max(rep.max_abs_drift, std::abs(h - rep.initial));
    }
    const double span = traj.samples.back().t() - traj.samples.front().t();
    rep.drift_per_unit_time = rep.max_abs_drift / span;
    rep.sample_count = static_cast<long>(traj.samples.size());
    rep.conserved = rep.max_abs_drift <= 1e-6 * std::max(1.0, std::abs(rep.initial));
    return rep;
}

TaylorComparison compare_taylor(const Trajectory& traj, int order, double base_horizon,
                                int levels) {
    validate(traj);
    if (traj.samples.front().max_order() < order)
        throw OrderError("trajectory jets carry orders 0.." +
                         std::to_string(traj.samples.front().max_order()) +
                         ", need " + std::to_string(order));
    if (levels < 2) throw Error("need at least 2 horizon levels");
    const double t_end = traj.samples.back().t();
    const int dim = traj.samples.front().dim();

    TaylorComparison out;
    out.order = order;
    std::vector<double> log_h, log_e;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const double dt = base_horizon / std::pow(2.0, lvl);
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const double t_target = traj.samples[i].t() + dt;
            if (t_target > t_end + 1e-12) break;
            // nearest accepted sample to t_target (times increase, so walk forward)
            std::size_t j = i;
            while (j + 1 < traj.samples.size() &&
                   std::abs(traj.samples[j + 1].t() - t_target) <=
                       std::abs(traj.samples[j].t() - t_target))
                ++j;
            const JetPoint& ref = traj.samples[j];
            const JetPoint pred = taylor_propagate(traj.samples[i], ref.t() - traj.samples[i].t(),
                                                   order);
            double err = 0.0;
            for (int c = 0; c < dim; ++c) err += std::pow(pred.deriv(0, c) - ref.deriv(0, c), 2);
            worst = std::max(worst, std::sqrt(err));
        }
        out.rows.push_back({dt, worst});
        if (worst > 0) {
            log_h.push_back(std::log(dt));
            log_e.push_back(std::log(worst));
        }
    }
    if (log_h.size() >= 2) out.slope = linear_fit(log_h, log_e).first;
    return out;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("linear fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) throw Error("degenerate linear fit");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    return {slope, intercept};
}

} // namespace jetmech
