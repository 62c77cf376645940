#include "jetmech/action.hpp"

#include <cmath>
#include <limits>

#include "jetmech/euler_lagrange.hpp"
#include "jetmech/integrate.hpp"

namespace jetmech {

namespace {

double falling_factorial(int m, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= m - i;
    return acc;
}

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
    return acc;
}

} // namespace

double BumpPerturbation::value(double t) const { return derivative(t, 0); }

double BumpPerturbation::derivative(double t, int n) const {
    if (!(t1 > t0)) throw Error("perturbation window must have t1 > t0");
    if (t < t0 || t > t1) return 0.0;   // compactly supported
    const int m = exponent;
    const double norm = std::pow((t1 - t0) / 2.0, 2 * m);
    // Leibniz on u = (t-t0)^m, v = (t1-t)^m
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (k > m || n - k > m) continue;
        const double du = falling_factorial(m, k) * std::pow(t - t0, m - k);
        const double dv = falling_factorial(m, n - k) * std::pow(t1 - t, m - (n - k)) *
                          ((n - k) % 2 == 0 ? 1.0 : -1.0);
        acc += binomial(n, k) * du * dv;
    }
    return acc / norm;
}

double action_integral(const LagrangianModel& L, const Trajectory& traj, int resample_n) {
    validate(traj);
    if (traj.samples.size() < 3)
        throw Error("action integral needs at least 3 samples");
    const Trajectory* grid = &traj;
    Trajectory resampled;
    if (resample_n > 0 || !is_uniformly_sampled(traj)) {
        const int n = resample_n > 0 ? resample_n : static_cast<int>(traj.samples.size());
        resampled = resample_uniform(traj, std::max(n, 3));
        grid = &resampled;
    }
    const std::vector<JetPoint>& s = grid->samples;
    const double h = s[1].t() - s[0].t();
    std::vector<double> f(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) f[i] = eval_lagrangian(L, s[i]);

    const std::size_t intervals = s.size() - 1;
    const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
        acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    if (simpson_end != intervals)
        acc += h / 2.0 * (f[intervals - 1] + f[intervals]);   // trapezoid on the final cell
    return acc;
}

std::vector<double> default_eps_sweep() {
    std::vector<double> eps;
    for (int i = 0; i <= 6; ++i) eps.push_back(std::pow(10.0, -2.0 - 0.5 * i));
    return eps;
}

namespace {

Trajectory perturb(const Trajectory& traj, const BumpPerturbation& pert, double eps) {
    Trajectory out;
    out.method = traj.method;
    out.samples.reserve(traj.samples.size());
    const int m_order = traj.samples.front().max_order();
    const int dim = traj.samples.front().dim();
    for (const JetPoint& s : traj.samples) {
        std::vector<double> data = s.data();
        for (int n = 0; n <= m_order; ++n)
            data[static_cast<std::size_t>(n) * dim + pert.component] +=
                eps * pert.derivative(s.t(), n);
        out.samples.emplace_back(s.t(), dim, std::move(data));
    }
    return out;
}

} // namespace

StationarityReport stationarity_test(const LagrangianModel& L, const Trajectory& traj,
                                     const BumpPerturbation& pert,
                                     const std::vector<double>& eps_sweep,
                                     double residual_threshold) {
    validate(traj);
    const int N = L.order();
    if (pert.exponent < N)
        throw Error("perturbation exponent " + std::to_string(pert.exponent) +
                    " violates the endpoint conditions; need m >= " + std::to_string(N));
    const double span_t0 = traj.samples.front().t();
    const double span_t1 = traj.samples.back().t();
    const double span = span_t1 - span_t0;
    if (pert.t0 < span_t0 - 1e-9 * span || pert.t1 > span_t1 + 1e-9 * span)
        throw Error("perturbation support extends beyond the trajectory span");
    if (pert.component < 0 || pert.component >= traj.samples.front().dim())
        throw Error("perturbation component out of range");
    for (int n = 0; n < N; ++n) {
        if (std::abs(pert.derivative(pert.t0, n)) > 1e-12 ||
            std::abs(pert.derivative(pert.t1, n)) > 1e-12)
            throw Error("perturbation does not vanish to order N-1 at the endpoints");
    }

    StationarityReport rep;
    rep.max_residual = max_abs_el_residual(L, traj);
    rep.valid = rep.max_residual <= residual_threshold;
    rep.action = action_integral(L, traj);

    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(rep.action);
    std::vector<double> log_eps, log_ds;
    for (double eps : eps_sweep) {
        const Trajectory pert_traj = perturb(traj, pert, eps);
        const double ds = action_integral(L, pert_traj) - rep.action;
        rep.epsilons.push_back(eps);
        rep.delta_s.push_back(ds);
        if (std::abs(ds) <= floor || ds == 0.0) {
            rep.noise_floor_hit = true;
            continue;
        }
        log_eps.push_back(std::log(eps));
        log_ds.push_back(std::log(std::abs(ds)));
    }
    if (log_eps.size() >= 2) {
        const auto [slope, intercept] = linear_fit(log_eps, log_ds);
        rep.slope = slope;
        rep.intercept = intercept;
    } else {
        rep.noise_floor_hit = true;
        rep.valid = false;
    }
    return rep;
}

double pointwise_action(const LagrangianModel& L, const JetPoint& jet) {
    return generalized_hamiltonian(L, jet, Convention::literal);
}

} // namespace jetmech
