#pragma once

// Nonsmooth expression trees with exact one-sided directional derivatives.
//
// Text syntax (prefix, s-expressions):
//   expr := (var i) | (const c) | c
//         | (add e e ...) | (sub e e) | (mul e e) | (scale c e) | (neg e)
//         | (abs e) | (max e e ...) | (min e e ...) | (norm e ...)
// A bare number is shorthand for (const c). Printing always emits the
// canonical form, so parse(print(e)) == e.

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "compass/error.hpp"
#include "compass/linalg.hpp"
#include "compass/oracle.hpp"

namespace compass {

enum class Op { Var, Const, Add, Sub, Mul, Scale, Neg, Abs, Max, Min, Norm };

inline const char* op_name(Op op) {
    switch (op) {
        case Op::Var: return "var";
        case Op::Const: return "const";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Scale: return "scale";
        case Op::Neg: return "neg";
        case Op::Abs: return "abs";
        case Op::Max: return "max";
        case Op::Min: return "min";
        case Op::Norm: return "norm";
    }
    return "?";
}

/// Immutable expression handle. Copies share the underlying node.
class Expr {
    struct Node {
        Op op;
        double scalar = 0.0;     // Const value, Scale factor
        std::size_t index = 0;   // Var index
        std::vector<Expr> children;
    };

public:
    static Expr var(std::size_t i) { return Expr(Node{Op::Var, 0.0, i, {}}); }
    static Expr constant(double c) { return Expr(Node{Op::Const, c, 0, {}}); }
    static Expr add(std::vector<Expr> c) { return nary(Op::Add, std::move(c), 2); }
    static Expr sub(Expr a, Expr b) { return Expr(Node{Op::Sub, 0.0, 0, {std::move(a), std::move(b)}}); }
    static Expr mul(Expr a, Expr b) { return Expr(Node{Op::Mul, 0.0, 0, {std::move(a), std::move(b)}}); }
    static Expr scale(double c, Expr a) { return Expr(Node{Op::Scale, c, 0, {std::move(a)}}); }
    static Expr neg(Expr a) { return Expr(Node{Op::Neg, 0.0, 0, {std::move(a)}}); }
    static Expr abs(Expr a) { return Expr(Node{Op::Abs, 0.0, 0, {std::move(a)}}); }
    static Expr max(std::vector<Expr> c) { return nary(Op::Max, std::move(c), 2); }
    static Expr min(std::vector<Expr> c) { return nary(Op::Min, std::move(c), 2); }
    static Expr norm(std::vector<Expr> c) { return nary(Op::Norm, std::move(c), 1); }

    Op op() const { return node_->op; }
    double scalar() const { return node_->scalar; }
    std::size_t index() const { return node_->index; }
    std::span<const Expr> children() const { return node_->children; }

    /// Number of variables the expression needs: 1 + largest var index, or 0.
    std::size_t arity() const {
        if (op() == Op::Var) return index() + 1;
        std::size_t n = 0;
        for (const Expr& c : children()) n = std::max(n, c.arity());
        return n;
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        if (a.node_ == b.node_) return true;
        if (a.op() != b.op() || a.index() != b.index() || a.children().size() != b.children().size())
            return false;
        if (std::bit_cast<std::uint64_t>(a.scalar()) != std::bit_cast<std::uint64_t>(b.scalar())) return false;
        for (std::size_t i = 0; i < a.children().size(); ++i)
            if (!(a.children()[i] == b.children()[i])) return false;
        return true;
    }

private:
    explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

    static Expr nary(Op op, std::vector<Expr> c, std::size_t min_children) {
        if (c.size() < min_children)
            throw ArgumentError(std::string(op_name(op)) + " needs at least " + std::to_string(min_children) +
                                " operands");
        return Expr(Node{op, 0.0, 0, std::move(c)});
    }

    std::shared_ptr<const Node> node_;
};

/// A value together with its directional derivative along the current direction.
struct Tangent {
    double value;
    double deriv;
};

namespace detail {

inline Tangent tangent(const Expr& e, std::span<const double> x, std::span<const double> d) {
    auto kids = e.children();
    switch (e.op()) {
        case Op::Var: return {x[e.index()], d[e.index()]};
        case Op::Const: return {e.scalar(), 0.0};
        case Op::Add: {
            Tangent t = tangent(kids[0], x, d);
            for (std::size_t i = 1; i < kids.size(); ++i) {
                Tangent u = tangent(kids[i], x, d);
                t.value += u.value;
                t.deriv += u.deriv;
            }
            return t;
        }
        case Op::Sub: {
            Tangent a = tangent(kids[0], x, d), b = tangent(kids[1], x, d);
            return {a.value - b.value, a.deriv - b.deriv};
        }
        case Op::Mul: {
            Tangent a = tangent(kids[0], x, d), b = tangent(kids[1], x, d);
            return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
        }
        case Op::Scale: {
            Tangent a = tangent(kids[0], x, d);
            return {e.scalar() * a.value, e.scalar() * a.deriv};
        }
        case Op::Neg: {
            Tangent a = tangent(kids[0], x, d);
            return {-a.value, -a.deriv};
        }
        case Op::Abs: {
            Tangent a = tangent(kids[0], x, d);
            if (a.value > 0.0) return {a.value, a.deriv};
            if (a.value < 0.0) return {-a.value, -a.deriv};
            return {std::abs(a.value), std::abs(a.deriv)};
        }
        case Op::Max:
        case Op::Min: {
            const bool is_max = e.op() == Op::Max;
            auto better = [is_max](double a, double b) { return is_max ? a > b : a < b; };
            Tangent best = tangent(kids[0], x, d);
            for (std::size_t i = 1; i < kids.size(); ++i) {
                Tangent u = tangent(kids[i], x, d);
                if (better(u.value, best.value))
                    best = u;
                else if (u.value == best.value && better(u.deriv, best.deriv))
                    best.deriv = u.deriv;
            }
            return best;
        }
        case Op::Norm: {
            double vv = 0.0, vd = 0.0, dd = 0.0;
            for (const Expr& k : kids) {
                Tangent u = tangent(k, x, d);
                vv += u.value * u.value;
                vd += u.value * u.deriv;
                dd += u.deriv * u.deriv;
            }
            double nv = std::sqrt(vv);
            if (nv != 0.0) return {nv, vd / nv};
            return {0.0, std::sqrt(dd)};
        }
    }
    throw ArgumentError("unknown expression node");
}

inline void check_point(const Expr& e, std::span<const double> x) {
    if (e.arity() > x.size())
        throw ArgumentError("dimension mismatch: expression uses " + std::to_string(e.arity()) +
                            " variables, point has " + std::to_string(x.size()));
}

}  // namespace detail

inline double eval_value(const Expr& e, std::span<const double> x) {
    detail::check_point(e, x);
    Vector zero(x.size(), 0.0);
    return detail::tangent(e, x, zero).value;
}

/// Exact one-sided directional derivative f'(x; d) by forward propagation of
/// (value, derivative) pairs. Ties in max/min take the max/min of the tied
/// derivatives; abs and norm at zero take the magnitude of the derivative.
inline double eval_dir_deriv(const Expr& e, std::span<const double> x, std::span<const double> d) {
    detail::check_point(e, x);
    require_dim(d, x.size(), "direction");
    return detail::tangent(e, x, d).deriv;
}

// --- printing -------------------------------------------------------------

inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string print(const Expr& e) {
    switch (e.op()) {
        case Op::Var: return "(var " + std::to_string(e.index()) + ")";
        case Op::Const: return "(const " + format_number(e.scalar()) + ")";
        case Op::Scale: return "(scale " + format_number(e.scalar()) + " " + print(e.children()[0]) + ")";
        default: break;
    }
    std::string s = "(";
    s += op_name(e.op());
    for (const Expr& c : e.children()) s += " " + print(c);
    return s + ")";
}

// --- parsing --------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view atom() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (start == pos_) throw ParseError("expected an atom", start);
        return text_.substr(start, pos_ - start);
    }

    double number() {
        skip_ws();
        std::size_t start = pos_;
        std::string_view a = atom();
        const char* first = a.data();
        if (!a.empty() && a.front() == '+') ++first;
        double v = 0.0;
        auto res = std::from_chars(first, a.data() + a.size(), v);
        if (res.ec != std::errc() || res.ptr != a.data() + a.size() || !std::isfinite(v))
            throw ParseError("invalid number '" + std::string(a) + "'", start);
        return v;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    bool at_close(std::size_t open) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unclosed '('", open);
        return text_[pos_] == ')';
    }

    std::vector<Expr> operands(std::size_t open) {
        std::vector<Expr> out;
        while (!at_close(open)) out.push_back(parse_expr());
        return out;
    }

    Expr parse_expr() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        if (text_[pos_] != '(') return Expr::constant(number());
        std::size_t open = pos_;
        ++pos_;
        std::size_t head_pos = pos_;
        std::string head(atom());
        Expr result = Expr::constant(0.0);
        auto arity = [&](const std::vector<Expr>& ops, std::size_t lo, std::size_t hi) {
            if (ops.size() < lo || ops.size() > hi)
                throw ParseError("wrong number of operands for '" + head + "'", head_pos);
        };
        if (head == "var") {
            skip_ws();
            std::size_t p = pos_;
            double v = number();
            if (v < 0 || v != std::floor(v) || v > 1e6) throw ParseError("variable index must be a small integer", p);
            result = Expr::var(static_cast<std::size_t>(v));
        } else if (head == "const") {
            result = Expr::constant(number());
        } else if (head == "scale") {
            double c = number();
            auto ops = operands(open);
            arity(ops, 1, 1);
            result = Expr::scale(c, ops[0]);
        } else {
            auto ops = operands(open);
            constexpr std::size_t many = static_cast<std::size_t>(-1);
            if (head == "add") { arity(ops, 2, many); result = Expr::add(std::move(ops)); }
            else if (head == "sub") { arity(ops, 2, 2); result = Expr::sub(ops[0], ops[1]); }
            else if (head == "mul") { arity(ops, 2, 2); result = Expr::mul(ops[0], ops[1]); }
            else if (head == "neg") { arity(ops, 1, 1); result = Expr::neg(ops[0]); }
            else if (head == "abs") { arity(ops, 1, 1); result = Expr::abs(ops[0]); }
            else if (head == "max") { arity(ops, 2, many); result = Expr::max(std::move(ops)); }
            else if (head == "min") { arity(ops, 2, many); result = Expr::min(std::move(ops)); }
            else if (head == "norm") { arity(ops, 1, many); result = Expr::norm(std::move(ops)); }
            else throw ParseError("unknown operator '" + head + "'", head_pos);
        }
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unclosed '('", open);
        expect(')');
        return result;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text) { return detail::Parser(text).parse_all(); }

// --- oracles --------------------------------------------------------------

/// Oracle over R^dim backed by an expression.
inline DirectionalOracle make_oracle(const Expr& e, std::size_t dim) {
    if (e.arity() > dim)
        throw ArgumentError("expression uses " + std::to_string(e.arity()) + " variables but dimension is " +
                            std::to_string(dim));
    return DirectionalOracle(
        dim, [e](std::span<const double> x) { return eval_value(e, x); },
        [e](std::span<const double> x, std::span<const double> d) { return eval_dir_deriv(e, x, d); });
}

/// Componentwise vector oracle R^in_dim -> R^components.size().
inline VectorOracle make_vector_oracle(const std::vector<Expr>& components, std::size_t in_dim) {
    for (const Expr& e : components)
        if (e.arity() > in_dim)
            throw ArgumentError("component expression uses " + std::to_string(e.arity()) +
                                " variables but input dimension is " + std::to_string(in_dim));
    return VectorOracle(
        in_dim, components.size(),
        [components](std::span<const double> x) {
            Vector out;
            out.reserve(components.size());
            for (const Expr& e : components) out.push_back(eval_value(e, x));
            return out;
        },
        [components](std::span<const double> x, std::span<const double> d) {
            Vector out;
            out.reserve(components.size());
            for (const Expr& e : components) out.push_back(eval_dir_deriv(e, x, d));
            return out;
        });
}

}  // namespace compass
