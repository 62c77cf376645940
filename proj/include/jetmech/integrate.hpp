#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jetmech/euler_lagrange.hpp"
#include "jetmech/jet.hpp"

namespace jetmech {

/// Integration method and controls.
struct IntegratorSpec {
    enum class Method { rk4, rk45 } method = Method::rk45;
    double step = 1e-2;        ///< fixed step (rk4); shrunk to divide the span evenly
    double rel_tol = 1e-10;    ///< adaptive controller (rk45)
    double abs_tol = 1e-12;
    long max_steps = 2'000'000;

    static IntegratorSpec fixed(double step);
    static IntegratorSpec adaptive(double rel_tol, double abs_tol = 1e-12);
};

/// Right-hand side of a generic first-order system y' = f(t, y).
using OdeRhs = std::function<void(double t, const double* y, double* dydt)>;

/// Raw integration output for generic systems.
struct OdeSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    long accepted = 0;
    long rejected = 0;
};

/// Integrates y' = f(t, y) from t0 to t1 (either direction), recording every
/// accepted step.  Throws ConvergenceError on step-size underflow or when
/// max_steps is exhausted.  `guard` (optional) may veto a proposed state; a
/// veto stops integration early with the samples collected so far and sets
/// `aborted`.  Guarded runs also convert underflow/step exhaustion into an
/// aborted partial result (the usual outcome of running into a singularity
/// the guard is watching for).
OdeSolution integrate_ode(const OdeRhs& f, int n, std::vector<double> y0, double t0, double t1,
                          const IntegratorSpec& spec,
                          const std::function<bool(double, const double*)>& guard = nullptr,
                          bool* aborted = nullptr);

/// Integrates the equation of motion from the initial jet (orders 0..2N-1
/// used) to t1.  Every sample carries orders 0..2N, the top order from the
/// EL solve.
Trajectory integrate_eom(const EOMSystem& sys, const JetPoint& init, double t1,
                         const IntegratorSpec& spec);

/// Drift statistics of a conserved-candidate quantity along a trajectory.
struct ConservationReport {
    std::string quantity;
    double initial = 0.0;
    double max_abs_drift = 0.0;
    double drift_per_unit_time = 0.0;
    long sample_count = 0;
    bool conserved = false;   ///< max drift below 1e-6 * max(1, |initial|)
};

/// Evaluates the generalized Hamiltonian at every sample and reports drift.
ConservationReport conservation_report(const Trajectory& traj, const LagrangianModel& L,
                                       Convention convention = Convention::standard);

/// One row of the Taylor-vs-integrator error table.
struct TaylorErrorRow {
    double horizon = 0.0;      ///< requested propagation horizon dt
    double max_error = 0.0;    ///< worst position error across start samples
};

struct TaylorComparison {
    std::vector<TaylorErrorRow> rows;
    double slope = 0.0;        ///< log-log convergence slope (expect order+1)
    int order = 0;
};

/// Propagates each sample forward by a dyadic sweep of horizons at the given
/// Taylor order and compares against the nearest integrated sample.
/// Horizons are base_horizon / 2^j, j = 0..levels-1.
TaylorComparison compare_taylor(const Trajectory& traj, int order, double base_horizon,
                                int levels = 6);

/// Least-squares fit y = slope*x + intercept.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace jetmech
