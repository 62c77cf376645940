#pragma once

#include <vector>

#include "jetmech/jet.hpp"
#include "jetmech/lagrangian.hpp"

namespace jetmech {

/// Smooth compactly supported bump used as the trajectory variation:
///   eta(t) = [(t - t0)(t1 - t)]^m / ((t1 - t0)/2)^(2m)  inside [t0, t1],
///   0 outside,
/// normalized to peak value 1 at the midpoint.  eta and its first m-1
/// derivatives vanish at both support edges, so m must be at least the
/// Lagrangian order N for all variation boundary terms to vanish.  The
/// support may be the whole trajectory span or an interior sub-window.
struct BumpPerturbation {
    double t0 = 0.0;
    double t1 = 1.0;
    int exponent = 2;    ///< m
    int component = 0;

    double value(double t) const;
    /// Exact n-th derivative of eta at t (Leibniz on the product form).
    double derivative(double t, int n) const;
};

/// Integral of L along a uniformly sampled trajectory by composite Simpson
/// quadrature; an odd final interval falls back to one trapezoid cell.
/// Non-uniform trajectories are resampled first (Taylor-based; pass
/// resample_n to control the grid, default keeps the sample count).
double action_integral(const LagrangianModel& L, const Trajectory& traj, int resample_n = 0);

struct StationarityReport {
    double action = 0.0;         ///< S of the unperturbed trajectory
    double slope = 0.0;          ///< log|dS| vs log eps fit
    double intercept = 0.0;
    bool valid = false;          ///< trajectory solves the EOM and endpoint conditions hold
    bool noise_floor_hit = false;
    double max_residual = 0.0;   ///< max |EL residual| along the trajectory
    std::vector<double> epsilons;
    std::vector<double> delta_s;
};

/// Default geometric sweep 1e-2, 1e-2.5, ..., 1e-5.
std::vector<double> default_eps_sweep();

/// Measures dS(eps) = S[r + eps*eta] - S[r] over the sweep and fits
/// log|dS| against log eps.  Slope near 2 certifies first-order
/// stationarity; slope near 1 marks a non-solution trajectory (also flagged
/// via `valid`).  Perturbed jets are rebuilt with exact derivatives of eta.
StationarityReport stationarity_test(const LagrangianModel& L, const Trajectory& traj,
                                     const BumpPerturbation& pert,
                                     const std::vector<double>& eps_sweep = default_eps_sweep(),
                                     double residual_threshold = 1e-4);

/// The algebraic action function sum_a p_a . r^(a) evaluated at one phase
/// point with the standard momenta.  This is the same contraction as the
/// literal Hamiltonian form; it generally differs from the integral action
/// and is reported alongside it for comparison, not reconciled.
double pointwise_action(const LagrangianModel& L, const JetPoint& jet);

} // namespace jetmech
