#include "jetmech/euler_lagrange.hpp"

#include <cmath>
#include <cstring>

namespace jetmech {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxSteps = 50;

/// d/dt with the max order taken from the expression itself.
Expression ddt(const Expression& e) {
    return total_time_derivative(e, std::max(inventory(e).max_jet_order, 0));
}

/// Per-component EL residual expression sum_n (-1)^n (d/dt)^n dL/dr^(n).
Expression residual_expression(const LagrangianModel& L, int comp, int dim) {
    const Expression L_expr = L.as_expression(dim);
    Expression sum = Expression::constant(0.0);
    for (int n = 0; n <= L.order(); ++n) {
        Expression term = partial_derivative(L_expr, VarRef::jet(n, comp));
        for (int k = 0; k < n; ++k) term = ddt(term);
        sum = (n % 2 == 0) ? sum + term : sum - term;
    }
    return sum;
}

Bindings bind(const LagrangianModel& L, const JetPoint& jet) {
    Bindings b;
    b.params = L.params();
    b.jet = &jet;
    return b;
}

void require_order(const JetPoint& jet, int needed, const char* what) {
    if (jet.max_order() < needed)
        throw OrderError(std::string(what) + " needs jet orders up to " +
                         std::to_string(needed) + ", jet carries 0.." +
                         std::to_string(jet.max_order()));
}

/// Solves expr(..., x, ...) = 0 for the jet variable (order, comp) by damped
/// Newton.  `data` is order-major flat storage holding all other orders; the
/// slot for (order, comp) is used as the initial guess and receives the root.
void newton_solve_in_place(const Expression& expr, const Expression& dexpr,
                           const Bindings& params_only, double t, int dim,
                           std::vector<double>& data, int order, int comp) {
    const std::size_t slot = static_cast<std::size_t>(order) * dim + comp;
    double x = data[slot];
    auto residual_at = [&](double v) {
        data[slot] = v;
        JetPoint jp(t, dim, data);
        Bindings b = params_only;
        b.jet = &jp;
        return evaluate(expr, b);
    };
    double f = residual_at(x);
    for (int it = 0; it < kNewtonMaxSteps; ++it) {
        if (std::abs(f) <= kNewtonTol) {
            data[slot] = x;
            return;
        }
        JetPoint jp(t, dim, data);
        Bindings b = params_only;
        b.jet = &jp;
        const double df = evaluate(dexpr, b);
        if (df == 0.0 || !std::isfinite(df))
            throw ConvergenceError("top-order solve: derivative vanished");
        double step = -f / df;
        // damping: halve until the residual shrinks
        for (int h = 0; h < 30; ++h) {
            const double f_new = residual_at(x + step);
            if (std::isfinite(f_new) && std::abs(f_new) < std::abs(f)) {
                x += step;
                f = f_new;
                break;
            }
            step *= 0.5;
            if (h == 29)
                throw ConvergenceError("top-order solve: damped Newton failed to reduce residual");
        }
    }
    if (std::abs(f) > kNewtonTol)
        throw ConvergenceError("top-order solve did not converge in " +
                               std::to_string(kNewtonMaxSteps) + " steps");
    data[slot] = x;
}

} // namespace

std::vector<double> el_residual(const LagrangianModel& L, const JetPoint& jet) {
    require_order(jet, 2 * L.order(), "el_residual");
    std::vector<double> out(jet.dim(), 0.0);
    for (int c = 0; c < jet.dim(); ++c) {
        const Expression r = residual_expression(L, c, jet.dim());
        out[c] = evaluate(r, bind(L, jet));
    }
    return out;
}

double max_abs_el_residual(const LagrangianModel& L, const Trajectory& traj) {
    validate(traj);
    const int dim = traj.samples.front().dim();
    require_order(traj.samples.front(), 2 * L.order(), "el_residual");
    std::vector<Expression> residuals;
    for (int c = 0; c < dim; ++c) residuals.push_back(residual_expression(L, c, dim));
    double worst = 0.0;
    for (const JetPoint& s : traj.samples) {
        for (int c = 0; c < dim; ++c)
            worst = std::max(worst, std::abs(evaluate(residuals[c], bind(L, s))));
    }
    return worst;
}

EOMSystem derive_eom(const LagrangianModel& L, int dim) {
    if (dim < 1 || dim > 3) throw Error("dim must be 1, 2 or 3");
    if (L.order() < 1)
        throw DegeneracyError("the Lagrangian does not depend on any derivative; "
                              "no equation of motion");

    EOMSystem sys;
    sys.model_ = L;
    sys.order_ = L.order();
    sys.dim_ = dim;

    const int N = L.order();
    for (int c = 0; c < dim; ++c)
        sys.residuals_.push_back(residual_expression(L, c, dim));

    if (L.is_quadratic()) {
        // residual per component: sum_n (-1)^n 2 c_n r^(2n); solve for r^(2N)
        sys.linear_ = true;
        const double cN = L.coeffs()[N];
        sys.linear_coeff_.assign(N, 0.0);
        for (int n = 0; n < N; ++n) {
            const int sign = ((N - n) % 2 == 0) ? 1 : -1;
            sys.linear_coeff_[n] = -sign * L.coeffs()[n] / cN;
        }
    } else {
        for (int c = 0; c < dim; ++c) {
            Expression d = partial_derivative(sys.residuals_[c], VarRef::jet(2 * N, c));
            if (d.root()->kind == detail::Kind::constant && d.root()->value == 0.0)
                throw DegeneracyError("EL residual does not depend on the top derivative "
                                      "r" + std::to_string(2 * N) + "; degenerate Lagrangian");
            sys.residual_top_diff_.push_back(std::move(d));
        }
    }
    return sys;
}

std::vector<double> EOMSystem::top_orders(double t, const double* state,
                                          SolveScratch* scratch) const {
    const int N = order_;
    std::vector<double> top(dim_, 0.0);
    if (linear_) {
        for (int c = 0; c < dim_; ++c) {
            const double* comp_state = state + static_cast<std::size_t>(c) * 2 * N;
            double acc = 0.0;
            for (int n = 0; n < N; ++n) acc += linear_coeff_[n] * comp_state[2 * n];
            top[c] = acc;
        }
        return top;
    }

    // order-major scratch jet carrying orders 0..2N
    std::vector<double> data(static_cast<std::size_t>(2 * N + 1) * dim_, 0.0);
    for (int c = 0; c < dim_; ++c)
        for (int n = 0; n < 2 * N; ++n)
            data[static_cast<std::size_t>(n) * dim_ + c] = state[c * 2 * N + n];
    if (scratch && scratch->seed.size() == static_cast<std::size_t>(dim_))
        for (int c = 0; c < dim_; ++c)
            data[static_cast<std::size_t>(2 * N) * dim_ + c] = scratch->seed[c];

    Bindings params_only;
    params_only.params = model_.params();
    // Gauss-Seidel over components; each residual is linear in its own top
    // derivative, so one or two sweeps settle cross-component coupling.
    for (int sweep = 0; sweep < kNewtonMaxSteps; ++sweep) {
        bool done = true;
        for (int c = 0; c < dim_; ++c) {
            newton_solve_in_place(residuals_[c], residual_top_diff_[c], params_only, t, dim_,
                                  data, 2 * N, c);
        }
        JetPoint jp(t, dim_, data);
        Bindings b = params_only;
        b.jet = &jp;
        for (int c = 0; c < dim_; ++c)
            if (std::abs(evaluate(residuals_[c], b)) > kNewtonTol) done = false;
        if (done) break;
        if (sweep == kNewtonMaxSteps - 1)
            throw ConvergenceError("coupled top-order solve did not converge");
    }
    for (int c = 0; c < dim_; ++c) top[c] = data[static_cast<std::size_t>(2 * N) * dim_ + c];
    if (scratch) scratch->seed = top;
    return top;
}

void EOMSystem::rhs(double t, const double* state, double* deriv, SolveScratch* scratch) const {
    const int N = order_;
    const std::vector<double> top = top_orders(t, state, scratch);
    for (int c = 0; c < dim_; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * 2 * N;
        for (int n = 0; n < 2 * N - 1; ++n) deriv[base + n] = state[base + n + 1];
        deriv[base + 2 * N - 1] = top[c];
    }
}

JetPoint EOMSystem::state_to_jet(double t, const double* state, SolveScratch* scratch) const {
    const int N = order_;
    std::vector<double> data(static_cast<std::size_t>(2 * N + 1) * dim_, 0.0);
    for (int c = 0; c < dim_; ++c)
        for (int n = 0; n < 2 * N; ++n)
            data[static_cast<std::size_t>(n) * dim_ + c] = state[c * 2 * N + n];
    const std::vector<double> top = top_orders(t, state, scratch);
    for (int c = 0; c < dim_; ++c)
        data[static_cast<std::size_t>(2 * N) * dim_ + c] = top[c];
    return JetPoint(t, dim_, std::move(data));
}

std::vector<double> EOMSystem::jet_to_state(const JetPoint& init) const {
    if (init.dim() != dim_) throw Error("initial jet dimension does not match the system");
    require_order(init, 2 * order_ - 1, "first-order reduction");
    std::vector<double> state(static_cast<std::size_t>(state_dim()), 0.0);
    for (int c = 0; c < dim_; ++c)
        for (int n = 0; n < 2 * order_; ++n)
            state[static_cast<std::size_t>(c) * 2 * order_ + n] = init.deriv(n, c);
    return state;
}

namespace {

/// Standard momenta as expressions: p_a = sum_{n=a+1..N} (-d/dt)^(n-a-1) dL/dr^(n).
std::vector<Expression> standard_momenta_expressions(const LagrangianModel& L, int comp, int dim) {
    const Expression L_expr = L.as_expression(dim);
    const int N = L.order();
    std::vector<Expression> out;
    for (int a = 0; a < N; ++a) {
        Expression p = Expression::constant(0.0);
        for (int n = a + 1; n <= N; ++n) {
            Expression term = partial_derivative(L_expr, VarRef::jet(n, comp));
            for (int k = 0; k < n - a - 1; ++k) term = -ddt(term);
            p = p + term;
        }
        out.push_back(p);
    }
    return out;
}

/// Literal momenta: p_a = sum_{n=a..N} (-1)^(n-a) (d/dt)^(n-a) dL/dr^(n).
std::vector<Expression> literal_momenta_expressions(const LagrangianModel& L, int comp, int dim) {
    const Expression L_expr = L.as_expression(dim);
    const int N = L.order();
    std::vector<Expression> out;
    for (int a = 0; a < N; ++a) {
        Expression p = Expression::constant(0.0);
        for (int n = a; n <= N; ++n) {
            Expression term = partial_derivative(L_expr, VarRef::jet(n, comp));
            for (int k = 0; k < n - a; ++k) term = ddt(term);
            p = ((n - a) % 2 == 0) ? p + term : p - term;
        }
        out.push_back(p);
    }
    return out;
}

} // namespace

MomentaVector ostrogradsky_momenta(const LagrangianModel& L, const JetPoint& jet,
                                   Convention convention) {
    const int N = L.order();
    const int needed = convention == Convention::standard ? 2 * N - 1 : 2 * N;
    require_order(jet, std::max(needed, 0), "momenta");
    MomentaVector mv;
    mv.convention = convention;
    mv.values.assign(N, std::vector<double>(jet.dim(), 0.0));
    for (int c = 0; c < jet.dim(); ++c) {
        const std::vector<Expression> exprs =
            convention == Convention::standard
                ? standard_momenta_expressions(L, c, jet.dim())
                : literal_momenta_expressions(L, c, jet.dim());
        for (int a = 0; a < N; ++a) mv.values[a][c] = evaluate(exprs[a], bind(L, jet));
    }
    return mv;
}

double generalized_hamiltonian(const LagrangianModel& L, const JetPoint& jet,
                               Convention convention) {
    const int N = L.order();
    require_order(jet, std::max(2 * N - 1, 0), "hamiltonian");
    const MomentaVector p = ostrogradsky_momenta(L, jet, Convention::standard);
    double acc = 0.0;
    for (int a = 0; a < N; ++a)
        for (int c = 0; c < jet.dim(); ++c)
            acc += p.values[a][c] * jet.deriv(convention == Convention::standard ? a + 1 : a, c);
    if (convention == Convention::standard) acc -= eval_lagrangian(L, jet);
    return acc;
}

ForceLadder force_ladder(const LagrangianModel& L, const JetPoint& jet) {
    require_order(jet, L.order(), "force ladder");
    const int rungs = (L.order() + 2) / 2;   // ceil((N+1)/2)
    ForceLadder fl;
    fl.forces.assign(rungs, std::vector<double>(jet.dim(), 0.0));
    fl.momenta.assign(rungs, std::vector<double>(jet.dim(), 0.0));
    for (int c = 0; c < jet.dim(); ++c) {
        for (int a = 0; a < rungs; ++a) {
            fl.forces[a][c] =
                evaluate(partial_wrt_order(L, 2 * a, c, jet.dim()), bind(L, jet));
            fl.momenta[a][c] =
                evaluate(partial_wrt_order(L, 2 * a + 1, c, jet.dim()), bind(L, jet));
        }
    }
    return fl;
}

std::vector<double> newton_balance_residual(const LagrangianModel& L, const JetPoint& jet) {
    require_order(jet, 2 * L.order(), "newton balance");
    const int rungs = (L.order() + 2) / 2;
    std::vector<double> out(jet.dim(), 0.0);
    for (int c = 0; c < jet.dim(); ++c) {
        Expression balance = Expression::constant(0.0);
        for (int a = 0; a < rungs; ++a) {
            balance = balance + partial_wrt_order(L, 2 * a, c, jet.dim());
            Expression p = partial_wrt_order(L, 2 * a + 1, c, jet.dim());
            for (int k = 0; k < a + 1; ++k) p = ddt(p);
            balance = balance - p;
        }
        out[c] = evaluate(balance, bind(L, jet));
    }
    return out;
}

JetPoint extend_jet(const EOMSystem& sys, const JetPoint& jet, int target_order) {
    const int N = sys.order();
    if (jet.dim() != sys.dim()) throw Error("jet dimension does not match the system");
    require_order(jet, 2 * N, "extend_jet");
    if (target_order <= jet.max_order()) return jet;

    const int dim = sys.dim();
    std::vector<double> data = jet.data();
    data.resize(static_cast<std::size_t>(target_order + 1) * dim, 0.0);

    Bindings params_only;
    params_only.params = sys.model().params();

    // (d/dt)^k of the residual vanishes along solutions and is linear in
    // order 2N+k; solve each order in turn.
    std::vector<Expression> level = sys.residual_expressions();
    for (int m = 2 * N + 1; m <= target_order; ++m) {
        for (int c = 0; c < dim; ++c) {
            level[c] = ddt(level[c]);
            Expression d = partial_derivative(level[c], VarRef::jet(m, c));
            newton_solve_in_place(level[c], d, params_only, jet.t(), dim, data, m, c);
        }
    }
    return JetPoint(jet.t(), dim, std::move(data));
}

Trajectory extend_trajectory(const EOMSystem& sys, const Trajectory& traj, int target_order) {
    validate(traj);
    Trajectory out;
    out.method = traj.method;
    out.accepted = traj.accepted;
    out.rejected = traj.rejected;
    out.samples.reserve(traj.samples.size());
    for (const JetPoint& s : traj.samples) out.samples.push_back(extend_jet(sys, s, target_order));
    return out;
}

EomSymbolic symbolic_eom(const LagrangianModel& L) {
    EomSymbolic out;
    out.order = L.order();
    out.eom = residual_expression(L, 0, 1);
    out.momenta = standard_momenta_expressions(L, 0, 1);
    Expression h = Expression::constant(0.0);
    for (int a = 0; a < L.order(); ++a)
        h = h + out.momenta[a] * Expression::jet_var(a + 1, 0, true);
    out.hamiltonian = h - L.as_expression(1);
    return out;
}

} // namespace jetmech
