#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "jetmech/errors.hpp"
#include "jetmech/jet.hpp"

namespace jetmech {

/// A small expression language for Lagrangians and potentials.
///
/// Trees are immutable and shared; all operations are pure functions, so
/// expressions may be evaluated concurrently.  Grammar (standard infix):
///
///   precedence  ^  >  unary -  >  * /  >  + -
///   identifiers [A-Za-z_][A-Za-z0-9_]*
///   reserved    t, r<n>, r<n>_<x|y|z>   (jet variables per derivative order)
///   functions   exp, sin, cos, ln, sqrt
///
/// `^` requires a constant exponent.  Everything else that looks like an
/// identifier is a named parameter.
class Expression;

namespace detail {

enum class Kind { constant, param, jet_var, time, unary, binary };
enum class UnaryOp { neg, exp, sin, cos, ln, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };

struct Node {
    Kind kind;
    double value = 0.0;          // constant
    std::string name;            // param
    int order = -1;              // jet_var
    int comp = 0;                // jet_var component (0=x, 1=y, 2=z)
    bool plain = true;           // jet_var written r<n> (dim-1 style) vs r<n>_<c>
    UnaryOp uop = UnaryOp::neg;
    BinaryOp bop = BinaryOp::add;
    std::shared_ptr<const Node> lhs, rhs;
};

using NodePtr = std::shared_ptr<const Node>;

} // namespace detail

/// Identifies a variable an expression may be differentiated against:
/// a jet variable, a named parameter, or time.
struct VarRef {
    enum class Kind { jet_var, param, time } kind;
    std::string name;   // param
    int order = -1;     // jet_var
    int comp = 0;       // jet_var

    static VarRef jet(int order, int comp = 0) { return {Kind::jet_var, "", order, comp}; }
    static VarRef parameter(std::string name) { return {Kind::param, std::move(name), -1, 0}; }
    static VarRef time() { return {Kind::time, "", -1, 0}; }

    /// Parses "r2", "r1_y", "t" or a parameter name.
    static VarRef from_string(const std::string& text);
};

/// Values for the free variables of an expression: named parameters plus a
/// jet supplying the jet variables and t.  Either part may be absent when the
/// expression does not use it.
struct Bindings {
    std::map<std::string, double> params;
    const JetPoint* jet = nullptr;
};

class Expression {
public:
    Expression() = default;
    explicit Expression(detail::NodePtr root) : root_(std::move(root)) {}

    bool empty() const { return root_ == nullptr; }
    const detail::NodePtr& root() const { return root_; }

    // -- construction -------------------------------------------------------
    static Expression constant(double v);
    static Expression parameter(const std::string& name);
    static Expression jet_var(int order, int comp = 0, bool plain_style = true);
    static Expression time();

    // Smart constructors fold constants and apply the 0/1 identities, so
    // derivative output stays readable.
    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    static Expression pow(const Expression& base, double exponent);
    static Expression apply(detail::UnaryOp op, const Expression& arg);

private:
    detail::NodePtr root_;
};

Expression exp(const Expression& e);
Expression sin(const Expression& e);
Expression cos(const Expression& e);
Expression ln(const Expression& e);
Expression sqrt(const Expression& e);

/// Parses expression text.  Throws ParseError with the byte offset of the
/// first offending character.
Expression parse(const std::string& text);

/// Canonical parenthesized text; render(parse(x)) reparses to an equal tree.
std::string render(const Expression& e);

/// Structural equality.
bool equal(const Expression& a, const Expression& b);

/// IEEE double evaluation.  Throws DomainError for division by zero, ln/sqrt
/// domain violations and invalid powers; Error for unbound variables.
double evaluate(const Expression& e, const Bindings& b);

/// Exact symbolic partial derivative with conservative simplification.
Expression partial_derivative(const Expression& e, const VarRef& var);

/// Total time derivative d/dt through the jet variables:
///   de/dt = de/dt|explicit + sum_n (de/dr<n>) * r<n+1>
/// Introduces jet variables up to max_order+1.  The expression must not use
/// jet orders above max_order.
Expression total_time_derivative(const Expression& e, int max_order);

/// Free-variable inventory of an expression.
struct VarInventory {
    std::set<std::pair<int, int>> jet_vars;   // (order, comp)
    std::set<std::string> params;
    bool uses_time = false;
    int max_jet_order = -1;
};
VarInventory inventory(const Expression& e);

} // namespace jetmech
