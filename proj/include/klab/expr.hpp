#pragma once

// Closed-form coefficient expressions a(x,y), b(x,y), h(x,y).
//
// Grammar, loosest binding first:
//   + -        binary, left-associative
//   * /        binary, left-associative
//   -          unary prefix
//   ^          binary, right-associative
// so "-x^2" is -(x^2) and "2^-1" is 2^(-1). Operands are decimal literals
// (optional fraction and exponent), the variables x and y, the constants pi
// and e, parenthesized expressions, and single-argument calls to sin, cos,
// exp, log, sqrt, abs, tanh.

#include <memory>
#include <string>
#include <string_view>

#include "klab/grid.hpp"

namespace klab {

class Expr {
public:
    enum class Kind { Number, Symbol, Negate, Binary, Call };
    enum class Symbol { X, Y, Pi, E };
    enum class BinaryOp { Add, Sub, Mul, Div, Pow };
    enum class Function { Sin, Cos, Exp, Log, Sqrt, Abs, Tanh };

    static Expr number(double value);
    static Expr symbol(Symbol s);
    static Expr negate(Expr operand);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr call(Function f, Expr arg);

    Kind kind() const;

    /// Throws Error(DomainError) on division by zero, log of a non-positive
    /// number, sqrt of a negative number, or any non-finite result.
    double eval(double x, double y) const;

    /// Fully parenthesized form that parses back to an equal tree.
    std::string to_string() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Throws ParseError with kind UnbalancedParen, UnknownIdentifier,
/// UnexpectedToken or EmptyInput and the byte offset of the problem.
Expr parse(std::string_view src);

/// Evaluates at every interior node. Domain errors name the node.
ScalarField eval_field(const Expr& expr, const Grid& grid);

}  // namespace klab
