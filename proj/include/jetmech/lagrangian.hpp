#pragma once

#include <map>
#include <string>
#include <vector>

#include "jetmech/expr.hpp"
#include "jetmech/jet.hpp"

namespace jetmech {

/// Lagrangian depending on coordinates and their time derivatives up to
/// order N.  Two representations:
///
///  * quadratic: L = sum_n c_n (r^(n))^2, summed over spatial components.
///    Coefficients carry the sign; nothing is assumed about convexity.
///  * expression: any DSL expression over t and jet variables, with named
///    parameter values.
///
/// Trailing zero coefficients of a quadratic model are trimmed so the top
/// order stays nondegenerate (the `order_reduced` flag records that this
/// happened).
class LagrangianModel {
public:
    static LagrangianModel quadratic(std::vector<double> coeffs);
    static LagrangianModel expression(Expression expr, std::map<std::string, double> params = {});
    static LagrangianModel expression(const std::string& dsl_text,
                                      std::map<std::string, double> params = {});

    /// L = 1/2 r1^2 - 1/2 w^2 r0^2  (simple oscillator with frequency w).
    static LagrangianModel harmonic(double omega);

    /// L = 1/2 r2^2 - 1/2 (w1^2 + w2^2) r1^2 + 1/2 w1^2 w2^2 r0^2
    /// (fourth-order oscillator with frequencies w1, w2).
    static LagrangianModel pais_uhlenbeck(double omega1, double omega2);

    bool is_quadratic() const { return quadratic_; }
    int order() const { return order_; }                   ///< N
    bool order_reduced() const { return order_reduced_; }

    /// Quadratic coefficients c_0..c_N (quadratic models only).
    const std::vector<double>& coeffs() const;

    const std::map<std::string, double>& params() const { return params_; }

    /// The Lagrangian as a DSL expression over jet variables for the given
    /// spatial dimension.  Expression models are dim-1 unless authored with
    /// component-suffixed variables.
    Expression as_expression(int dim) const;

private:
    LagrangianModel() = default;
    bool quadratic_ = false;
    bool order_reduced_ = false;
    int order_ = 0;
    std::vector<double> coeffs_;
    Expression expr_;
    std::map<std::string, double> params_;
};

/// Value of L at the jet.  Throws OrderError if the jet carries fewer
/// derivative orders than the model uses.
double eval_lagrangian(const LagrangianModel& L, const JetPoint& jet);

/// dL/dr^(n) for one spatial component, as an expression.  Zero when the
/// model does not involve order n.
Expression partial_wrt_order(const LagrangianModel& L, int n, int comp = 0, int dim = 1);

/// The energy decomposition into ranks: rank j pairs derivative orders
/// (2j-2, 2j-1), so rank 1 is potential+kinetic, rank 2 the
/// acceleration-energy pair, and so on.
struct EnergyRanks {
    std::vector<double> ranks;       ///< E_1, E_2, ...
    std::vector<double> per_order;   ///< c_n (r^(n))^2 per order, unpaired
    double total = 0.0;
};

/// Evaluates the rank decomposition of a quadratic model (read as an energy
/// quadratic form) at the jet.
EnergyRanks energy_ranks(const LagrangianModel& L, const JetPoint& jet);

} // namespace jetmech
