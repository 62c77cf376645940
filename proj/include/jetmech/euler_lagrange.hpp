#pragma once

#include <optional>
#include <vector>

#include "jetmech/expr.hpp"
#include "jetmech/jet.hpp"
#include "jetmech/lagrangian.hpp"

namespace jetmech {

/// Momentum / Hamiltonian conventions.
///
///  * standard:  p_a = sum_{n=a+1..N} (-d/dt)^(n-a-1) dL/dr^(n); together with
///    H = sum p_a r^(a+1) - L this is conserved for time-independent L.
///  * literal:   the alternating ladder p_a = sum_{n=a..N} (-1)^(n-a)
///    (d/dt)^(n-a) dL/dr^(n).  For a = 0 it coincides with the
///    equation-of-motion expression and vanishes on solutions, so it is kept
///    for diagnostic reports rather than conservation.
enum class Convention { standard, literal };

/// Generalized momenta p_0..p_{N-1}, one dim-component vector per order.
struct MomentaVector {
    std::vector<std::vector<double>> values;   // [alpha][component]
    Convention convention = Convention::standard;
};

/// The force/momentum ladder F^(a) = dL/dr^(2a), p^(a) = dL/dr^(2a+1),
/// one rung per a = 0..ceil((N+1)/2)-1.
struct ForceLadder {
    std::vector<std::vector<double>> forces;   // [alpha][component]
    std::vector<std::vector<double>> momenta;  // [alpha][component]
};

/// Per-component Euler-Lagrange residual
///   sum_{n=0..N} (-1)^n (d/dt)^n dL/dr^(n)
/// with total derivatives expanded through jet variables.  Zero exactly on
/// solutions.  Requires jet orders up to 2N.
std::vector<double> el_residual(const LagrangianModel& L, const JetPoint& jet);

/// Largest |el_residual| component over all samples of a trajectory.
double max_abs_el_residual(const LagrangianModel& L, const Trajectory& traj);

/// First-order reduction of the Euler-Lagrange equation.  State layout is
/// component-major: [comp 0: r^(0)..r^(2N-1), comp 1: ...], which is also the
/// order the CSV export uses for a fixed component.
class EOMSystem {
public:
    int order() const { return order_; }           ///< N
    int dim() const { return dim_; }
    int state_dim() const { return 2 * order_ * dim_; }
    bool is_linear() const { return linear_; }
    const LagrangianModel& model() const { return model_; }

    /// Scratch carrying the previous top-order solution, used to seed the
    /// Newton solve for expression models.  One per concurrent integration.
    struct SolveScratch {
        std::vector<double> seed;
    };

    /// dstate/dt.  The top derivative r^(2N) is obtained by solving the EL
    /// equation (closed form for quadratic models, damped Newton otherwise).
    void rhs(double t, const double* state, double* deriv, SolveScratch* scratch = nullptr) const;

    /// r^(2N) per component at the given state.
    std::vector<double> top_orders(double t, const double* state,
                                   SolveScratch* scratch = nullptr) const;

    /// Jet of order 2N: orders 0..2N-1 from the state, order 2N solved.
    JetPoint state_to_jet(double t, const double* state, SolveScratch* scratch = nullptr) const;

    /// Flattens jet orders 0..2N-1 into the state layout.
    std::vector<double> jet_to_state(const JetPoint& init) const;

    /// Per-component EL residual expressions (dim-1 spelling when dim == 1).
    const std::vector<Expression>& residual_expressions() const { return residuals_; }

private:
    friend EOMSystem derive_eom(const LagrangianModel& L, int dim);
    LagrangianModel model_ = LagrangianModel::harmonic(1.0);
    int order_ = 0;
    int dim_ = 1;
    bool linear_ = false;
    std::vector<double> linear_coeff_;            // r^(2N) = sum_n linear_coeff_[n] r^(2n)
    std::vector<Expression> residuals_;           // per component
    std::vector<Expression> residual_top_diff_;   // dR_c / dr^(2N)_c
};

/// Derives the equation of motion.  Throws DegeneracyError when the residual
/// does not depend on the top derivative.
EOMSystem derive_eom(const LagrangianModel& L, int dim = 1);

/// Generalized momenta at a jet.  The standard convention needs jet orders up
/// to 2N-1, the literal one up to 2N.
MomentaVector ostrogradsky_momenta(const LagrangianModel& L, const JetPoint& jet,
                                   Convention convention = Convention::standard);

/// Energy function over the momentum ladder.  standard:
/// H = sum_a p_a . r^(a+1) - L (conserved for time-independent L);
/// literal: H = sum_a p_a . r^(a), the printed contraction form, evaluated
/// with the standard momenta and reported for comparison.
double generalized_hamiltonian(const LagrangianModel& L, const JetPoint& jet,
                               Convention convention = Convention::standard);

/// Evaluates every ladder entry by partial differentiation of L.
ForceLadder force_ladder(const LagrangianModel& L, const JetPoint& jet);

/// Per-component residual of the force-balance ladder
///   sum_a F^(a) - sum_a (d/dt)^(a+1) p^(a),
/// reported alongside el_residual for comparison (the two are different
/// expressions for N >= 2).
std::vector<double> newton_balance_residual(const LagrangianModel& L, const JetPoint& jet);

/// Extends a jet beyond order 2N using total derivatives of the EL equation:
/// order 2N+k is solved from (d/dt)^k applied to the residual.
JetPoint extend_jet(const EOMSystem& sys, const JetPoint& jet, int target_order);

/// extend_jet applied to every sample.
Trajectory extend_trajectory(const EOMSystem& sys, const Trajectory& traj, int target_order);

/// Symbolic artifacts of the derivation in dim-1 spelling.
struct EomSymbolic {
    int order = 0;                      ///< N
    Expression eom;                     ///< EL residual (equation eom = 0)
    std::vector<Expression> momenta;    ///< standard p_0..p_{N-1}
    Expression hamiltonian;             ///< standard H
};
EomSymbolic symbolic_eom(const LagrangianModel& L);

} // namespace jetmech
