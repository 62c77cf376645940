#include "jetmech/lagrangian.hpp"

#include <cmath>

namespace jetmech {

LagrangianModel LagrangianModel::quadratic(std::vector<double> coeffs) {
    if (coeffs.empty()) throw Error("quadratic Lagrangian needs at least one coefficient");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw Error("quadratic coefficients must be finite");
    LagrangianModel m;
    m.quadratic_ = true;
    // trim trailing zeros so the top order stays nondegenerate
    while (coeffs.size() > 1 && coeffs.back() == 0.0) {
        coeffs.pop_back();
        m.order_reduced_ = true;
    }
    m.order_ = static_cast<int>(coeffs.size()) - 1;
    m.coeffs_ = std::move(coeffs);
    return m;
}

LagrangianModel LagrangianModel::expression(Expression expr, std::map<std::string, double> params) {
    if (expr.empty()) throw Error("expression Lagrangian is empty");
    const VarInventory inv = inventory(expr);
    for (const auto& p : inv.params)
        if (!params.count(p)) throw Error("Lagrangian parameter '" + p + "' has no value");
    LagrangianModel m;
    m.quadratic_ = false;
    m.order_ = std::max(inv.max_jet_order, 0);
    m.expr_ = std::move(expr);
    m.params_ = std::move(params);
    return m;
}

LagrangianModel LagrangianModel::expression(const std::string& dsl_text,
                                            std::map<std::string, double> params) {
    return expression(parse(dsl_text), std::move(params));
}

LagrangianModel LagrangianModel::harmonic(double omega) {
    return quadratic({-0.5 * omega * omega, 0.5});
}

LagrangianModel LagrangianModel::pais_uhlenbeck(double omega1, double omega2) {
    const double w1 = omega1 * omega1, w2 = omega2 * omega2;
    return quadratic({0.5 * w1 * w2, -0.5 * (w1 + w2), 0.5});
}

const std::vector<double>& LagrangianModel::coeffs() const {
    if (!quadratic_) throw Error("coeffs() requires a quadratic model");
    return coeffs_;
}

Expression LagrangianModel::as_expression(int dim) const {
    if (!quadratic_) return expr_;
    Expression sum = Expression::constant(0.0);
    for (int n = 0; n <= order_; ++n) {
        if (coeffs_[n] == 0.0) continue;
        for (int c = 0; c < dim; ++c) {
            sum = sum + Expression::constant(coeffs_[n]) *
                            Expression::pow(Expression::jet_var(n, c, dim == 1), 2.0);
        }
    }
    return sum;
}

double eval_lagrangian(const LagrangianModel& L, const JetPoint& jet) {
    if (jet.max_order() < L.order())
        throw OrderError("jet carries orders 0.." + std::to_string(jet.max_order()) +
                         " but the Lagrangian uses order " + std::to_string(L.order()));
    if (L.is_quadratic()) {
        double acc = 0.0;
        for (int n = 0; n <= L.order(); ++n) {
            for (int c = 0; c < jet.dim(); ++c) {
                const double v = jet.deriv(n, c);
                acc += L.coeffs()[n] * v * v;
            }
        }
        return acc;
    }
    Bindings b;
    b.params = L.params();
    b.jet = &jet;
    return evaluate(L.as_expression(jet.dim()), b);
}

Expression partial_wrt_order(const LagrangianModel& L, int n, int comp, int dim) {
    if (n < 0) throw OrderError("derivative order must be >= 0");
    if (L.is_quadratic()) {
        if (n > L.order()) return Expression::constant(0.0);
        return Expression::constant(2.0 * L.coeffs()[n]) *
               Expression::jet_var(n, comp, dim == 1);
    }
    return partial_derivative(L.as_expression(dim), VarRef::jet(n, comp));
}

EnergyRanks energy_ranks(const LagrangianModel& L, const JetPoint& jet) {
    if (!L.is_quadratic())
        throw Error("energy ranks are defined for quadratic models");
    if (jet.max_order() < L.order())
        throw OrderError("jet carries orders 0.." + std::to_string(jet.max_order()) +
                         " but the energy form uses order " + std::to_string(L.order()));
    EnergyRanks out;
    const int n_orders = L.order() + 1;
    out.per_order.resize(n_orders, 0.0);
    for (int n = 0; n < n_orders; ++n) {
        double term = 0.0;
        for (int c = 0; c < jet.dim(); ++c) {
            const double v = jet.deriv(n, c);
            term += L.coeffs()[n] * v * v;
        }
        out.per_order[n] = term;
        out.total += term;
    }
    const int n_ranks = (n_orders + 1) / 2;
    out.ranks.resize(n_ranks, 0.0);
    for (int n = 0; n < n_orders; ++n) out.ranks[n / 2] += out.per_order[n];
    return out;
}

} // namespace jetmech
