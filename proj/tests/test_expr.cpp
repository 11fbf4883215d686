#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "klab/error.hpp"
#include "klab/expr.hpp"
#include "support.hpp"

using namespace klab;
using klab::testing::Rng;

namespace {

double ev(const std::string& s, double x = 0.0, double y = 0.0) { return parse(s).eval(x, y); }

struct Failure {
    ErrorKind kind;
    std::size_t offset;
};

Failure parse_failure(const std::string& s) {
    try {
        parse(s);
    } catch (const ParseError& e) {
        return {e.kind(), e.offset()};
    }
    ADD_FAILURE() << "'" << s << "' parsed";
    return {ErrorKind::InvalidArgument, 0};
}

Expr random_expr(Rng& rng, int depth) {
    const int pick = depth == 0 ? rng.integer(0, 1) : rng.integer(0, 4);
    switch (pick) {
        case 0: {
            const double mags[] = {1.0, 1e-7, 3.5e12, 0.1};
            return Expr::number(rng.uniform(0.0, 10.0) * mags[rng.integer(0, 3)]);
        }
        case 1: return Expr::symbol(static_cast<Expr::Symbol>(rng.integer(0, 3)));
        case 2: return Expr::negate(random_expr(rng, depth - 1));
        case 3:
            return Expr::binary(static_cast<Expr::BinaryOp>(rng.integer(0, 4)), random_expr(rng, depth - 1),
                                random_expr(rng, depth - 1));
        default: return Expr::call(static_cast<Expr::Function>(rng.integer(0, 6)), random_expr(rng, depth - 1));
    }
}

}  // namespace

TEST(Parse, Precedence) {
    EXPECT_EQ(ev("2+3*4"), 14.0);
    EXPECT_EQ(ev("-x^2", 3.0), -9.0);
    EXPECT_EQ(ev("2^3^2"), 512.0);
    EXPECT_EQ(ev("8/4/2"), 1.0);
    EXPECT_EQ(ev("10-4-3"), 3.0);
    EXPECT_EQ(ev("-2*-3"), 6.0);
    EXPECT_EQ(ev("(1+2)*3"), 9.0);
    EXPECT_EQ(ev("2^-1"), 0.5);
}

TEST(Parse, LiteralsConstantsAndCalls) {
    EXPECT_DOUBLE_EQ(ev("1e-3"), 1e-3);
    EXPECT_DOUBLE_EQ(ev("2.5E+2"), 250.0);
    EXPECT_DOUBLE_EQ(ev(".5"), 0.5);
    EXPECT_DOUBLE_EQ(ev("pi"), std::numbers::pi);
    EXPECT_DOUBLE_EQ(ev("e"), std::numbers::e);
    EXPECT_DOUBLE_EQ(ev("sin(x)+cos(y)", 0.3, 0.4), std::sin(0.3) + std::cos(0.4));
    EXPECT_DOUBLE_EQ(ev("exp(1)*log(e)"), std::exp(1.0));
    EXPECT_DOUBLE_EQ(ev("sqrt(abs(-4))+tanh(0)"), 2.0);
    EXPECT_DOUBLE_EQ(ev("  x *\ty ", 2.0, 3.0), 6.0);
}

TEST(Parse, ErrorsCarryOffsets) {
    const Failure open = parse_failure("sin(pi*x");
    EXPECT_EQ(open.kind, ErrorKind::UnbalancedParen);
    EXPECT_EQ(open.offset, 8u);
    EXPECT_EQ(parse_failure("(1+2))").kind, ErrorKind::UnbalancedParen);
    EXPECT_EQ(parse_failure("").kind, ErrorKind::EmptyInput);
    EXPECT_EQ(parse_failure("   ").kind, ErrorKind::EmptyInput);
    const Failure unknown = parse_failure("x + foo");
    EXPECT_EQ(unknown.kind, ErrorKind::UnknownIdentifier);
    EXPECT_EQ(unknown.offset, 4u);
    EXPECT_EQ(parse_failure("2 3").kind, ErrorKind::UnexpectedToken);
    EXPECT_EQ(parse_failure("1 +").kind, ErrorKind::UnexpectedToken);
    EXPECT_EQ(parse_failure("sin x").kind, ErrorKind::UnexpectedToken);
    EXPECT_EQ(parse_failure("2e").kind, ErrorKind::UnexpectedToken);
    EXPECT_EQ(parse_failure("x $ y").kind, ErrorKind::UnexpectedToken);
}

TEST(Eval, DomainErrors) {
    for (const char* s : {"1/(x-x)", "log(0)", "log(-1)", "sqrt(-1)", "exp(1000)"}) {
        try {
            ev(s);
            ADD_FAILURE() << s;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::DomainError) << s;
        }
    }
}

TEST(EvalField, NodeCoordinates) {
    const Grid g = Grid::unit_square(3);
    const ScalarField one = eval_field(parse("1"), g);
    for (double v : one.values()) EXPECT_EQ(v, 1.0);
    const ScalarField x = eval_field(parse("x"), g);
    EXPECT_DOUBLE_EQ(x(0, 1), 0.25);
    EXPECT_DOUBLE_EQ(x(1, 2), 0.5);
    EXPECT_DOUBLE_EQ(x(2, 0), 0.75);
}

TEST(EvalField, DomainErrorNamesTheNode) {
    try {
        eval_field(parse("1/(x-0.5)"), Grid::unit_square(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DomainError);
        EXPECT_NE(e.message().find("(2, 1)"), std::string::npos) << e.message();
        EXPECT_NE(e.message().find("0.5"), std::string::npos) << e.message();
    }
}

TEST(Expr, PrettyPrintRoundTrip) {
    Rng rng(31);
    for (int k = 0; k < 500; ++k) {
        const Expr e = random_expr(rng, rng.integer(0, 5));
        const std::string text = e.to_string();
        EXPECT_TRUE(parse(text) == e) << text;
        EXPECT_EQ(parse(text).to_string(), text);
    }
}

TEST(Expr, AlgebraicIdentityOnSamples) {
    Rng rng(32);
    const Expr lhs = parse("(x+y)^2");
    const Expr rhs = parse("x^2+2*x*y+y^2");
    for (int k = 0; k < 200; ++k) {
        const double x = rng.uniform(-10, 10), y = rng.uniform(-10, 10);
        const double a = lhs.eval(x, y), b = rhs.eval(x, y);
        EXPECT_LE(std::abs(a - b), 1e-12 * std::max(std::abs(a), 1.0));
    }
}

TEST(Expr, StructuralEquality) {
    EXPECT_TRUE(parse("x+1") == parse("(x + 1)"));
    EXPECT_FALSE(parse("x+1") == parse("1+x"));
    EXPECT_FALSE(parse("-2") == Expr::number(-2));
}
