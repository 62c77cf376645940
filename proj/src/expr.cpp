#include "jetmech/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace jetmech {

using detail::BinaryOp;
using detail::Kind;
using detail::Node;
using detail::NodePtr;
using detail::UnaryOp;

namespace {

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::constant && n->value == v;
}

NodePtr constant_node(double v) {
    Node n;
    n.kind = Kind::constant;
    n.value = v;
    return make_node(std::move(n));
}

bool integer_valued(double v) {
    return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15;
}

double eval_pow(double base, double expo) {
    if (base == 0.0 && expo < 0.0) throw DomainError("0 raised to a negative power");
    if (base < 0.0 && !integer_valued(expo))
        throw DomainError("negative base with non-integer exponent");
    return std::pow(base, expo);
}

NodePtr binary_node(BinaryOp op, NodePtr a, NodePtr b) {
    // constant folding
    if (a->kind == Kind::constant && b->kind == Kind::constant) {
        switch (op) {
            case BinaryOp::add: return constant_node(a->value + b->value);
            case BinaryOp::sub: return constant_node(a->value - b->value);
            case BinaryOp::mul: return constant_node(a->value * b->value);
            case BinaryOp::div:
                if (b->value != 0.0) return constant_node(a->value / b->value);
                break; // keep symbolic; evaluation reports the domain error
            case BinaryOp::pow: return constant_node(eval_pow(a->value, b->value));
        }
    }
    // identities
    switch (op) {
        case BinaryOp::add:
            if (is_const(a, 0)) return b;
            if (is_const(b, 0)) return a;
            break;
        case BinaryOp::sub:
            if (is_const(b, 0)) return a;
            if (is_const(a, 0)) {
                Node n;
                n.kind = Kind::unary;
                n.uop = UnaryOp::neg;
                n.lhs = b;
                return make_node(std::move(n));
            }
            break;
        case BinaryOp::mul:
            if (is_const(a, 0) || is_const(b, 0)) return constant_node(0.0);
            if (is_const(a, 1)) return b;
            if (is_const(b, 1)) return a;
            break;
        case BinaryOp::div:
            if (is_const(a, 0)) return constant_node(0.0);
            if (is_const(b, 1)) return a;
            break;
        case BinaryOp::pow:
            if (is_const(b, 0)) return constant_node(1.0);
            if (is_const(b, 1)) return a;
            break;
    }
    Node n;
    n.kind = Kind::binary;
    n.bop = op;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make_node(std::move(n));
}

NodePtr unary_node(UnaryOp op, NodePtr a) {
    if (a->kind == Kind::constant) {
        switch (op) {
            case UnaryOp::neg: return constant_node(-a->value);
            case UnaryOp::exp: return constant_node(std::exp(a->value));
            case UnaryOp::sin: return constant_node(std::sin(a->value));
            case UnaryOp::cos: return constant_node(std::cos(a->value));
            case UnaryOp::ln:
                if (a->value > 0) return constant_node(std::log(a->value));
                break;
            case UnaryOp::sqrt:
                if (a->value >= 0) return constant_node(std::sqrt(a->value));
                break;
        }
    }
    if (op == UnaryOp::neg && a->kind == Kind::unary && a->uop == UnaryOp::neg)
        return a->lhs;
    Node n;
    n.kind = Kind::unary;
    n.uop = op;
    n.lhs = std::move(a);
    return make_node(std::move(n));
}

} // namespace

// -- construction -----------------------------------------------------------

Expression Expression::constant(double v) { return Expression(constant_node(v)); }

Expression Expression::parameter(const std::string& name) {
    Node n;
    n.kind = Kind::param;
    n.name = name;
    return Expression(make_node(std::move(n)));
}

Expression Expression::jet_var(int order, int comp, bool plain_style) {
    if (order < 0) throw Error("jet variable order must be >= 0");
    if (comp < 0 || comp > 2) throw Error("jet variable component must be 0..2");
    Node n;
    n.kind = Kind::jet_var;
    n.order = order;
    n.comp = comp;
    n.plain = plain_style && comp == 0;
    return Expression(make_node(std::move(n)));
}

Expression Expression::time() {
    Node n;
    n.kind = Kind::time;
    return Expression(make_node(std::move(n)));
}

Expression operator+(const Expression& a, const Expression& b) {
    return Expression(binary_node(BinaryOp::add, a.root(), b.root()));
}
Expression operator-(const Expression& a, const Expression& b) {
    return Expression(binary_node(BinaryOp::sub, a.root(), b.root()));
}
Expression operator*(const Expression& a, const Expression& b) {
    return Expression(binary_node(BinaryOp::mul, a.root(), b.root()));
}
Expression operator/(const Expression& a, const Expression& b) {
    return Expression(binary_node(BinaryOp::div, a.root(), b.root()));
}
Expression operator-(const Expression& a) {
    return Expression(unary_node(UnaryOp::neg, a.root()));
}
Expression Expression::pow(const Expression& base, double exponent) {
    return Expression(binary_node(BinaryOp::pow, base.root(), constant_node(exponent)));
}
Expression Expression::apply(UnaryOp op, const Expression& arg) {
    return Expression(unary_node(op, arg.root()));
}

Expression exp(const Expression& e) { return Expression::apply(UnaryOp::exp, e); }
Expression sin(const Expression& e) { return Expression::apply(UnaryOp::sin, e); }
Expression cos(const Expression& e) { return Expression::apply(UnaryOp::cos, e); }
Expression ln(const Expression& e) { return Expression::apply(UnaryOp::ln, e); }
Expression sqrt(const Expression& e) { return Expression::apply(UnaryOp::sqrt, e); }

// -- variable parsing --------------------------------------------------------

namespace {

/// Returns true and fills (order, comp, plain) if `name` is a jet variable:
/// r<digits> or r<digits>_<x|y|z>.
bool parse_jet_name(const std::string& name, int& order, int& comp, bool& plain) {
    if (name.size() < 2 || name[0] != 'r' || !std::isdigit(static_cast<unsigned char>(name[1])))
        return false;
    std::size_t i = 1;
    while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
    long ord = std::strtol(name.c_str() + 1, nullptr, 10);
    if (i == name.size()) {
        order = static_cast<int>(ord);
        comp = 0;
        plain = true;
        return true;
    }
    if (i + 2 == name.size() && name[i] == '_') {
        const char c = name[i + 1];
        if (c == 'x' || c == 'y' || c == 'z') {
            order = static_cast<int>(ord);
            comp = c - 'x';
            plain = false;
            return true;
        }
    }
    return false;
}

} // namespace

VarRef VarRef::from_string(const std::string& text) {
    if (text == "t") return VarRef::time();
    int order, comp;
    bool plain;
    if (parse_jet_name(text, order, comp, plain)) return VarRef::jet(order, comp);
    if (text.empty()) throw Error("empty variable name");
    return VarRef::parameter(text);
}

// -- parser -------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    NodePtr parse_expression() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = binary_node(BinaryOp::add, lhs, parse_term());
            else if (eat('-')) lhs = binary_node(BinaryOp::sub, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (eat('*')) lhs = binary_node(BinaryOp::mul, lhs, parse_unary());
            else if (eat('/')) lhs = binary_node(BinaryOp::div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return unary_node(UnaryOp::neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (eat('^')) {
            const std::size_t expo_pos = pos;
            NodePtr expo = parse_unary(); // right-assoc, unary sign allowed in exponent
            if (expo->kind != Kind::constant) {
                pos = expo_pos;
                fail("exponent must be a constant");
            }
            return binary_node(BinaryOp::pow, base, expo);
        }
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expression();
            skip_ws();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* start = text.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) fail("invalid number");
        pos += static_cast<std::size_t>(end - start);
        return constant_node(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string name = text.substr(start, pos - start);

        if (peek() == '(') {
            // function application
            UnaryOp op;
            if (name == "exp") op = UnaryOp::exp;
            else if (name == "sin") op = UnaryOp::sin;
            else if (name == "cos") op = UnaryOp::cos;
            else if (name == "ln") op = UnaryOp::ln;
            else if (name == "sqrt") op = UnaryOp::sqrt;
            else {
                pos = start;
                fail("unknown function '" + name + "'");
            }
            eat('(');
            NodePtr arg = parse_expression();
            if (!eat(')')) fail("expected ')'");
            return unary_node(op, arg);
        }

        if (name == "t") {
            Node n;
            n.kind = Kind::time;
            return make_node(std::move(n));
        }
        int order, comp;
        bool plain;
        if (parse_jet_name(name, order, comp, plain)) {
            Node n;
            n.kind = Kind::jet_var;
            n.order = order;
            n.comp = comp;
            n.plain = plain;
            return make_node(std::move(n));
        }
        Node n;
        n.kind = Kind::param;
        n.name = name;
        return make_node(std::move(n));
    }
};

} // namespace

Expression parse(const std::string& text) {
    if (text.empty()) throw ParseError("empty expression", 0);
    Parser p(text);
    NodePtr root = p.parse_expression();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return Expression(root);
}

// -- rendering ----------------------------------------------------------------

namespace {

int precedence(const Node& n) {
    switch (n.kind) {
        case Kind::binary:
            switch (n.bop) {
                case BinaryOp::add:
                case BinaryOp::sub: return 1;
                case BinaryOp::mul:
                case BinaryOp::div: return 2;
                case BinaryOp::pow: return 4;
            }
            return 0;
        case Kind::unary:
            return n.uop == UnaryOp::neg ? 3 : 5;
        default:
            return 5;
    }
}

void render_node(const Node& n, std::string& out) {
    auto child = [&](const NodePtr& c, bool needs_paren) {
        if (needs_paren) out += '(';
        render_node(*c, out);
        if (needs_paren) out += ')';
    };
    switch (n.kind) {
        case Kind::constant: {
            if (n.value < 0) {
                // rendered as a negation so the text reparses cleanly
                out += "(-";
                out += format_full(-n.value);
                out += ')';
            } else {
                out += format_full(n.value);
            }
            return;
        }
        case Kind::param: out += n.name; return;
        case Kind::time: out += 't'; return;
        case Kind::jet_var:
            out += 'r';
            out += std::to_string(n.order);
            if (!n.plain) {
                out += '_';
                out += static_cast<char>('x' + n.comp);
            }
            return;
        case Kind::unary: {
            switch (n.uop) {
                case UnaryOp::neg:
                    out += '-';
                    child(n.lhs, precedence(*n.lhs) < 3);
                    return;
                case UnaryOp::exp: out += "exp"; break;
                case UnaryOp::sin: out += "sin"; break;
                case UnaryOp::cos: out += "cos"; break;
                case UnaryOp::ln: out += "ln"; break;
                case UnaryOp::sqrt: out += "sqrt"; break;
            }
            out += '(';
            render_node(*n.lhs, out);
            out += ')';
            return;
        }
        case Kind::binary: {
            const int prec = precedence(n);
            const char* op = nullptr;
            bool paren_rhs_equal = false;
            switch (n.bop) {
                case BinaryOp::add: op = " + "; break;
                case BinaryOp::sub: op = " - "; paren_rhs_equal = true; break;
                case BinaryOp::mul: op = "*"; break;
                case BinaryOp::div: op = "/"; paren_rhs_equal = true; break;
                case BinaryOp::pow: op = "^"; paren_rhs_equal = true; break;
            }
            child(n.lhs, precedence(*n.lhs) < prec);
            out += op;
            child(n.rhs, precedence(*n.rhs) < prec + (paren_rhs_equal ? 1 : 0));
            return;
        }
    }
}

} // namespace

std::string render(const Expression& e) {
    if (e.empty()) throw Error("cannot render empty expression");
    std::string out;
    render_node(*e.root(), out);
    return out;
}

bool equal(const Expression& a, const Expression& b) {
    std::function<bool(const NodePtr&, const NodePtr&)> eq = [&](const NodePtr& x,
                                                                 const NodePtr& y) {
        if (x == y) return true;
        if (!x || !y || x->kind != y->kind) return false;
        switch (x->kind) {
            case Kind::constant: return x->value == y->value;
            case Kind::param: return x->name == y->name;
            case Kind::time: return true;
            case Kind::jet_var: return x->order == y->order && x->comp == y->comp;
            case Kind::unary: return x->uop == y->uop && eq(x->lhs, y->lhs);
            case Kind::binary:
                return x->bop == y->bop && eq(x->lhs, y->lhs) && eq(x->rhs, y->rhs);
        }
        return false;
    };
    return eq(a.root(), b.root());
}

// -- evaluation ----------------------------------------------------------------

namespace {

double eval_node(const Node& n, const Bindings& b) {
    switch (n.kind) {
        case Kind::constant: return n.value;
        case Kind::param: {
            auto it = b.params.find(n.name);
            if (it == b.params.end()) throw Error("unbound parameter '" + n.name + "'");
            return it->second;
        }
        case Kind::time:
            if (!b.jet) throw Error("unbound variable 't' (no jet bound)");
            return b.jet->t();
        case Kind::jet_var: {
            if (!b.jet)
                throw Error("unbound jet variable r" + std::to_string(n.order));
            if (n.plain && b.jet->dim() != 1)
                throw Error("plain jet variable r" + std::to_string(n.order) +
                            " used with dim " + std::to_string(b.jet->dim()) +
                            " jet; use the _x/_y/_z form");
            if (n.comp >= b.jet->dim())
                throw Error("jet variable component out of range for dim " +
                            std::to_string(b.jet->dim()));
            if (n.order > b.jet->max_order())
                throw OrderError("jet variable r" + std::to_string(n.order) +
                                 " exceeds jet order " + std::to_string(b.jet->max_order()));
            return b.jet->deriv(n.order, n.comp);
        }
        case Kind::unary: {
            const double v = eval_node(*n.lhs, b);
            switch (n.uop) {
                case UnaryOp::neg: return -v;
                case UnaryOp::exp: return std::exp(v);
                case UnaryOp::sin: return std::sin(v);
                case UnaryOp::cos: return std::cos(v);
                case UnaryOp::ln:
                    if (v <= 0) throw DomainError("ln of non-positive value");
                    return std::log(v);
                case UnaryOp::sqrt:
                    if (v < 0) throw DomainError("sqrt of negative value");
                    return std::sqrt(v);
            }
            break;
        }
        case Kind::binary: {
            const double x = eval_node(*n.lhs, b);
            const double y = eval_node(*n.rhs, b);
            switch (n.bop) {
                case BinaryOp::add: return x + y;
                case BinaryOp::sub: return x - y;
                case BinaryOp::mul: return x * y;
                case BinaryOp::div:
                    if (y == 0.0) throw DomainError("division by zero");
                    return x / y;
                case BinaryOp::pow: return eval_pow(x, y);
            }
            break;
        }
    }
    throw Error("malformed expression node");
}

} // namespace

double evaluate(const Expression& e, const Bindings& b) {
    if (e.empty()) throw Error("cannot evaluate empty expression");
    return eval_node(*e.root(), b);
}

// -- differentiation -------------------------------------------------------------

namespace {

bool matches(const Node& n, const VarRef& var) {
    switch (var.kind) {
        case VarRef::Kind::jet_var:
            return n.kind == Kind::jet_var && n.order == var.order && n.comp == var.comp;
        case VarRef::Kind::param:
            return n.kind == Kind::param && n.name == var.name;
        case VarRef::Kind::time:
            return n.kind == Kind::time;
    }
    return false;
}

NodePtr diff_node(const NodePtr& n, const VarRef& var) {
    if (matches(*n, var)) return constant_node(1.0);
    switch (n->kind) {
        case Kind::constant:
        case Kind::param:
        case Kind::time:
        case Kind::jet_var:
            return constant_node(0.0);
        case Kind::unary: {
            NodePtr du = diff_node(n->lhs, var);
            switch (n->uop) {
                case UnaryOp::neg: return unary_node(UnaryOp::neg, du);
                case UnaryOp::exp:
                    return binary_node(BinaryOp::mul, unary_node(UnaryOp::exp, n->lhs), du);
                case UnaryOp::sin:
                    return binary_node(BinaryOp::mul, unary_node(UnaryOp::cos, n->lhs), du);
                case UnaryOp::cos:
                    return unary_node(UnaryOp::neg, binary_node(BinaryOp::mul,
                                                                unary_node(UnaryOp::sin, n->lhs), du));
                case UnaryOp::ln: return binary_node(BinaryOp::div, du, n->lhs);
                case UnaryOp::sqrt:
                    return binary_node(
                        BinaryOp::div, du,
                        binary_node(BinaryOp::mul, constant_node(2.0),
                                    unary_node(UnaryOp::sqrt, n->lhs)));
            }
            break;
        }
        case Kind::binary: {
            switch (n->bop) {
                case BinaryOp::add:
                    return binary_node(BinaryOp::add, diff_node(n->lhs, var),
                                       diff_node(n->rhs, var));
                case BinaryOp::sub:
                    return binary_node(BinaryOp::sub, diff_node(n->lhs, var),
                                       diff_node(n->rhs, var));
                case BinaryOp::mul:
                    return binary_node(
                        BinaryOp::add,
                        binary_node(BinaryOp::mul, diff_node(n->lhs, var), n->rhs),
                        binary_node(BinaryOp::mul, n->lhs, diff_node(n->rhs, var)));
                case BinaryOp::div:
                    // (u/v)' = u'/v - u v'/v^2
                    return binary_node(
                        BinaryOp::sub,
                        binary_node(BinaryOp::div, diff_node(n->lhs, var), n->rhs),
                        binary_node(BinaryOp::div,
                                    binary_node(BinaryOp::mul, n->lhs, diff_node(n->rhs, var)),
                                    binary_node(BinaryOp::pow, n->rhs, constant_node(2.0))));
                case BinaryOp::pow: {
                    // exponent is a constant by construction
                    const double c = n->rhs->value;
                    return binary_node(
                        BinaryOp::mul,
                        binary_node(BinaryOp::mul, constant_node(c),
                                    binary_node(BinaryOp::pow, n->lhs, constant_node(c - 1.0))),
                        diff_node(n->lhs, var));
                }
            }
            break;
        }
    }
    throw Error("malformed expression node");
}

void collect(const NodePtr& n, VarInventory& inv) {
    switch (n->kind) {
        case Kind::constant: return;
        case Kind::param: inv.params.insert(n->name); return;
        case Kind::time: inv.uses_time = true; return;
        case Kind::jet_var:
            inv.jet_vars.insert({n->order, n->comp});
            inv.max_jet_order = std::max(inv.max_jet_order, n->order);
            return;
        case Kind::unary: collect(n->lhs, inv); return;
        case Kind::binary:
            collect(n->lhs, inv);
            collect(n->rhs, inv);
            return;
    }
}

} // namespace

Expression partial_derivative(const Expression& e, const VarRef& var) {
    if (e.empty()) throw Error("cannot differentiate empty expression");
    return Expression(diff_node(e.root(), var));
}

VarInventory inventory(const Expression& e) {
    VarInventory inv;
    if (!e.empty()) collect(e.root(), inv);
    return inv;
}

Expression total_time_derivative(const Expression& e, int max_order) {
    const VarInventory inv = inventory(e);
    if (inv.max_jet_order > max_order)
        throw OrderError("expression uses jet order " + std::to_string(inv.max_jet_order) +
                         " above the stated max order " + std::to_string(max_order));
    Expression out = partial_derivative(e, VarRef::time());
    for (const auto& [order, comp] : inv.jet_vars) {
        // keep the plain spelling for dim-1 expressions
        bool plain = true;
        std::function<void(const NodePtr&)> find_style = [&](const NodePtr& n) {
            if (n->kind == Kind::jet_var && n->order == order && n->comp == comp)
                plain = n->plain;
            if (n->lhs) find_style(n->lhs);
            if (n->rhs) find_style(n->rhs);
        };
        find_style(e.root());
        out = out + partial_derivative(e, VarRef::jet(order, comp)) *
                        Expression::jet_var(order + 1, comp, plain);
    }
    return out;
}

} // namespace jetmech
