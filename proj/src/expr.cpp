#include "klab/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

#include "klab/error.hpp"
#include "klab/format.hpp"

namespace klab {

struct Expr::Node {
    struct Number { double value; };
    struct Sym { Symbol symbol; };
    struct Negate { Expr operand; };
    struct Binary { BinaryOp op; Expr lhs; Expr rhs; };
    struct Call { Function function; Expr arg; };

    std::variant<Number, Sym, Negate, Binary, Call> data;
};

Expr Expr::number(double value) { return Expr(std::make_shared<const Node>(Node{Node::Number{value}})); }
Expr Expr::symbol(Symbol s) { return Expr(std::make_shared<const Node>(Node{Node::Sym{s}})); }
Expr Expr::negate(Expr operand) {
    return Expr(std::make_shared<const Node>(Node{Node::Negate{std::move(operand)}}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const Node>(Node{Node::Binary{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::call(Function f, Expr arg) {
    return Expr(std::make_shared<const Node>(Node{Node::Call{f, std::move(arg)}}));
}

Expr::Kind Expr::kind() const { return static_cast<Kind>(node_->data.index()); }

namespace {

constexpr std::array<std::pair<std::string_view, Expr::Function>, 7> kFunctions{{
    {"sin", Expr::Function::Sin},
    {"cos", Expr::Function::Cos},
    {"exp", Expr::Function::Exp},
    {"log", Expr::Function::Log},
    {"sqrt", Expr::Function::Sqrt},
    {"abs", Expr::Function::Abs},
    {"tanh", Expr::Function::Tanh},
}};

constexpr std::array<std::pair<std::string_view, Expr::Symbol>, 4> kSymbols{{
    {"x", Expr::Symbol::X},
    {"y", Expr::Symbol::Y},
    {"pi", Expr::Symbol::Pi},
    {"e", Expr::Symbol::E},
}};

std::string_view function_name(Expr::Function f) {
    for (const auto& [name, fn] : kFunctions) {
        if (fn == f) return name;
    }
    return "?";
}

std::string_view symbol_name(Expr::Symbol s) {
    for (const auto& [name, sym] : kSymbols) {
        if (sym == s) return name;
    }
    return "?";
}

char op_char(Expr::BinaryOp op) {
    switch (op) {
        case Expr::BinaryOp::Add: return '+';
        case Expr::BinaryOp::Sub: return '-';
        case Expr::BinaryOp::Mul: return '*';
        case Expr::BinaryOp::Div: return '/';
        case Expr::BinaryOp::Pow: return '^';
    }
    return '?';
}

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorKind::DomainError, what); }

double checked(double v, const char* what) {
    if (!std::isfinite(v)) domain_error(std::string("non-finite result of ") + what);
    return v;
}

}  // namespace

double Expr::eval(double x, double y) const {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Node::Number>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Node::Sym>) {
                switch (n.symbol) {
                    case Symbol::X: return x;
                    case Symbol::Y: return y;
                    case Symbol::Pi: return std::numbers::pi;
                    case Symbol::E: return std::numbers::e;
                }
                return 0.0;
            } else if constexpr (std::is_same_v<T, Node::Negate>) {
                return -n.operand.eval(x, y);
            } else if constexpr (std::is_same_v<T, Node::Binary>) {
                const double l = n.lhs.eval(x, y);
                const double r = n.rhs.eval(x, y);
                switch (n.op) {
                    case BinaryOp::Add: return checked(l + r, "addition");
                    case BinaryOp::Sub: return checked(l - r, "subtraction");
                    case BinaryOp::Mul: return checked(l * r, "multiplication");
                    case BinaryOp::Div:
                        if (r == 0.0) domain_error("division by zero");
                        return checked(l / r, "division");
                    case BinaryOp::Pow: return checked(std::pow(l, r), "power");
                }
                return 0.0;
            } else {
                const double a = n.arg.eval(x, y);
                switch (n.function) {
                    case Function::Sin: return std::sin(a);
                    case Function::Cos: return std::cos(a);
                    case Function::Exp: return checked(std::exp(a), "exp");
                    case Function::Log:
                        if (a <= 0.0) domain_error("log of non-positive value");
                        return std::log(a);
                    case Function::Sqrt:
                        if (a < 0.0) domain_error("sqrt of negative value");
                        return std::sqrt(a);
                    case Function::Abs: return std::abs(a);
                    case Function::Tanh: return std::tanh(a);
                }
                return 0.0;
            }
        },
        node_->data);
}

std::string Expr::to_string() const {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Node::Number>) {
                return format_double(n.value);
            } else if constexpr (std::is_same_v<T, Node::Sym>) {
                return std::string(symbol_name(n.symbol));
            } else if constexpr (std::is_same_v<T, Node::Negate>) {
                return "(-" + n.operand.to_string() + ")";
            } else if constexpr (std::is_same_v<T, Node::Binary>) {
                return "(" + n.lhs.to_string() + " " + op_char(n.op) + " " + n.rhs.to_string() + ")";
            } else {
                return std::string(function_name(n.function)) + "(" + n.arg.to_string() + ")";
            }
        },
        node_->data);
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->data.index() != b.node_->data.index()) return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const T& rhs = std::get<T>(b.node_->data);
            if constexpr (std::is_same_v<T, Expr::Node::Number>) {
                return lhs.value == rhs.value;
            } else if constexpr (std::is_same_v<T, Expr::Node::Sym>) {
                return lhs.symbol == rhs.symbol;
            } else if constexpr (std::is_same_v<T, Expr::Node::Negate>) {
                return lhs.operand == rhs.operand;
            } else if constexpr (std::is_same_v<T, Expr::Node::Binary>) {
                return lhs.op == rhs.op && lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
            } else {
                return lhs.function == rhs.function && lhs.arg == rhs.arg;
            }
        },
        a.node_->data);
}

// --- Parser -----------------------------------------------------------------

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok type;
    std::string_view text;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ == src_.size()) return {Tok::End, {}, start};
        const char ch = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            return {Tok::Ident, src_.substr(start, pos_ - start), start};
        }
        ++pos_;
        switch (ch) {
            case '+': return {Tok::Plus, src_.substr(start, 1), start};
            case '-': return {Tok::Minus, src_.substr(start, 1), start};
            case '*': return {Tok::Star, src_.substr(start, 1), start};
            case '/': return {Tok::Slash, src_.substr(start, 1), start};
            case '^': return {Tok::Caret, src_.substr(start, 1), start};
            case '(': return {Tok::LParen, src_.substr(start, 1), start};
            case ')': return {Tok::RParen, src_.substr(start, 1), start};
            default:
                throw ParseError(ErrorKind::UnexpectedToken, start,
                                 "unexpected character '" + std::string(1, ch) + "'");
        }
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t count = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) throw ParseError(ErrorKind::UnexpectedToken, start, "malformed number");
        // An exponent needs at least one digit; otherwise 'e' is left for the
        // constant (which then fails as a juxtaposition).
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        return {Tok::Number, src_.substr(start, pos_ - start), start};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

constexpr int kAdditive = 10;
constexpr int kMultiplicative = 20;
constexpr int kUnary = 30;
constexpr int kPower = 40;

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), lexer_(src) { advance(); }

    Expr parse_all() {
        if (current_.type == Tok::End) throw ParseError(ErrorKind::EmptyInput, 0, "empty expression");
        Expr e = expression(0);
        if (current_.type == Tok::RParen) {
            throw ParseError(ErrorKind::UnbalancedParen, current_.offset, "unmatched ')'");
        }
        if (current_.type != Tok::End) unexpected();
        return e;
    }

private:
    void advance() { current_ = lexer_.next(); }

    [[noreturn]] void unexpected() const {
        if (current_.type == Tok::End) {
            throw ParseError(ErrorKind::UnexpectedToken, current_.offset, "unexpected end of input");
        }
        throw ParseError(ErrorKind::UnexpectedToken, current_.offset,
                         "unexpected '" + std::string(current_.text) + "'");
    }

    void expect_close() {
        if (current_.type != Tok::RParen) {
            throw ParseError(ErrorKind::UnbalancedParen, current_.offset, "expected ')'");
        }
        advance();
    }

    static int infix_power(Tok t) {
        switch (t) {
            case Tok::Plus:
            case Tok::Minus: return kAdditive;
            case Tok::Star:
            case Tok::Slash: return kMultiplicative;
            case Tok::Caret: return kPower;
            default: return -1;
        }
    }

    Expr expression(int min_power) {
        Expr lhs = prefix();
        for (;;) {
            const Tok t = current_.type;
            const int power = infix_power(t);
            if (power < 0 || power <= min_power) break;
            advance();
            // ^ is right-associative: its right operand may contain another ^.
            Expr rhs = expression(t == Tok::Caret ? power - 1 : power);
            lhs = Expr::binary(binary_op(t), std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    static Expr::BinaryOp binary_op(Tok t) {
        switch (t) {
            case Tok::Plus: return Expr::BinaryOp::Add;
            case Tok::Minus: return Expr::BinaryOp::Sub;
            case Tok::Star: return Expr::BinaryOp::Mul;
            case Tok::Slash: return Expr::BinaryOp::Div;
            default: return Expr::BinaryOp::Pow;
        }
    }

    Expr prefix() {
        const Token tok = current_;
        switch (tok.type) {
            case Tok::Number: {
                advance();
                auto v = parse_double(tok.text);
                if (!v || !std::isfinite(*v)) {
                    throw ParseError(ErrorKind::UnexpectedToken, tok.offset, "literal out of range");
                }
                return Expr::number(*v);
            }
            case Tok::Minus:
                advance();
                return Expr::negate(expression(kUnary));
            case Tok::LParen: {
                advance();
                Expr inner = expression(0);
                expect_close();
                return inner;
            }
            case Tok::Ident: return identifier(tok);
            default: unexpected();
        }
    }

    Expr identifier(const Token& tok) {
        advance();
        for (const auto& [name, fn] : kFunctions) {
            if (name != tok.text) continue;
            if (current_.type != Tok::LParen) {
                throw ParseError(ErrorKind::UnexpectedToken, current_.offset,
                                 "expected '(' after " + std::string(name));
            }
            advance();
            Expr arg = expression(0);
            expect_close();
            return Expr::call(fn, std::move(arg));
        }
        for (const auto& [name, sym] : kSymbols) {
            if (name == tok.text) return Expr::symbol(sym);
        }
        throw ParseError(ErrorKind::UnknownIdentifier, tok.offset,
                         "unknown identifier '" + std::string(tok.text) + "'");
    }

    std::string_view src_;
    Lexer lexer_;
    Token current_{Tok::End, {}, 0};
};

}  // namespace

Expr parse(std::string_view src) { return Parser(src).parse_all(); }

ScalarField eval_field(const Expr& expr, const Grid& grid) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = grid.x(i);
            const double y = grid.y(j);
            try {
                out(i, j) = expr.eval(x, y);
            } catch (const Error& e) {
                throw Error(ErrorKind::DomainError, e.message() + " at node (" + std::to_string(i + 1) +
                                                        ", " + std::to_string(j + 1) + ") = (" +
                                                        format_double(x) + ", " + format_double(y) + ")");
            }
        }
    }
    return out;
}

}  // namespace klab
