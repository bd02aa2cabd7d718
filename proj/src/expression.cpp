#include "pshenv/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pshenv/error.hpp"

namespace pshenv {

using cplx = std::complex<double>;

namespace {

enum class Op {
    Number, ImagUnit, Coord, Complex, ZNorm,
    Neg, Add, Sub, Mul, Div, Pow,
    Re, Im, Abs, Exp, Log, Sqrt, Sin, Cos, Min, Max,
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_real(cplx v) { return v.imag() == 0.0; }

}  // namespace

struct Expression::Node {
    Op op = Op::Number;
    double value = 0.0;  // Number
    int index = 0;       // Coord axis / Complex variable index
    std::vector<std::shared_ptr<const Node>> args;

    cplx eval(std::span<const double> x) const {
        switch (op) {
            case Op::Number: return {value, 0.0};
            case Op::ImagUnit: return {0.0, 1.0};
            case Op::Coord: return {x[index], 0.0};
            case Op::Complex: return {x[2 * index], x[2 * index + 1]};
            case Op::ZNorm: {
                double s = 0.0;
                for (double c : x) s += c * c;
                return {std::sqrt(s), 0.0};
            }
            case Op::Neg: return -args[0]->eval(x);
            case Op::Add: return args[0]->eval(x) + args[1]->eval(x);
            case Op::Sub: return args[0]->eval(x) - args[1]->eval(x);
            case Op::Mul: return args[0]->eval(x) * args[1]->eval(x);
            case Op::Div: return args[0]->eval(x) / args[1]->eval(x);
            case Op::Pow: {
                cplx b = args[0]->eval(x);
                cplx e = args[1]->eval(x);
                if (!is_real(e)) return {kNaN, 0.0};
                double ev = e.real();
                if (ev == std::round(ev) && std::abs(ev) <= 64.0) {
                    // integer powers by repeated multiplication keep exactness
                    // on dyadic inputs and allow complex bases
                    int k = static_cast<int>(std::abs(ev));
                    cplx r{1.0, 0.0};
                    for (int t = 0; t < k; ++t) r *= b;
                    return ev < 0 ? cplx{1.0, 0.0} / r : r;
                }
                if (!is_real(b) || b.real() < 0.0) return {kNaN, 0.0};
                return {std::pow(b.real(), ev), 0.0};
            }
            case Op::Re: return {args[0]->eval(x).real(), 0.0};
            case Op::Im: return {args[0]->eval(x).imag(), 0.0};
            case Op::Abs: return {std::abs(args[0]->eval(x)), 0.0};
            case Op::Exp: {
                cplx a = args[0]->eval(x);
                return is_real(a) ? cplx{std::exp(a.real()), 0.0} : cplx{kNaN, 0.0};
            }
            case Op::Log: {
                cplx a = args[0]->eval(x);
                if (!is_real(a) || a.real() < 0.0) return {kNaN, 0.0};
                return {std::log(a.real()), 0.0};
            }
            case Op::Sqrt: {
                cplx a = args[0]->eval(x);
                if (!is_real(a) || a.real() < 0.0) return {kNaN, 0.0};
                return {std::sqrt(a.real()), 0.0};
            }
            case Op::Sin: {
                cplx a = args[0]->eval(x);
                return is_real(a) ? cplx{std::sin(a.real()), 0.0} : cplx{kNaN, 0.0};
            }
            case Op::Cos: {
                cplx a = args[0]->eval(x);
                return is_real(a) ? cplx{std::cos(a.real()), 0.0} : cplx{kNaN, 0.0};
            }
            case Op::Min:
            case Op::Max: {
                double best = op == Op::Min ? std::numeric_limits<double>::infinity()
                                            : -std::numeric_limits<double>::infinity();
                for (const auto& a : args) {
                    cplx v = a->eval(x);
                    if (!is_real(v) || std::isnan(v.real())) return {kNaN, 0.0};
                    best = op == Op::Min ? std::min(best, v.real()) : std::max(best, v.real());
                }
                return {best, 0.0};
            }
        }
        return {kNaN, 0.0};
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0, int index = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->args = std::move(args);
    n->value = value;
    n->index = index;
    return n;
}

class Parser {
public:
    Parser(std::string_view text, int dim) : s_(text), dim_(dim) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCode::ParseError,
                    "expression '" + std::string(s_) + "' column " + std::to_string(pos_ + 1) +
                        ": " + msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Op::Add, {lhs, term()});
            else if (accept('-')) lhs = make(Op::Sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Op::Mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Op::Div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Op::Pow, {base, unary()});
        return base;
    }

    std::string ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (accept('|')) {
            // |z| in C^2 is the Euclidean norm of the full vector
            std::size_t save = pos_;
            skip_ws();
            if (dim_ == 2 && pos_ < s_.size() && s_[pos_] == 'z') {
                ++pos_;
                std::size_t after = pos_;
                if (accept('|') && !(after < s_.size() && std::isalnum(static_cast<unsigned char>(s_[after]))))
                    return make(Op::ZNorm);
            }
            pos_ = save;
            NodePtr e = expr();
            expect('|');
            return make(Op::Abs, {e});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return named();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        char* end = nullptr;
        std::string buf(s_.substr(pos_));
        double v = std::strtod(buf.c_str(), &end);
        std::size_t used = static_cast<std::size_t>(end - buf.c_str());
        if (used == 0) fail("malformed number");
        pos_ += used;
        return make(Op::Number, {}, v);
    }

    NodePtr named() {
        std::size_t at = pos_;
        std::string id = ident();
        skip_ws();
        bool call = pos_ < s_.size() && s_[pos_] == '(';
        if (call) {
            static const std::pair<const char*, Op> funcs[] = {
                {"re", Op::Re},     {"Re", Op::Re},   {"im", Op::Im},   {"Im", Op::Im},
                {"abs", Op::Abs},   {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt},
                {"sin", Op::Sin},   {"cos", Op::Cos}, {"min", Op::Min}, {"max", Op::Max},
            };
            for (const auto& [name, op] : funcs) {
                if (id != name) continue;
                expect('(');
                std::vector<NodePtr> args{expr()};
                while (accept(',')) args.push_back(expr());
                expect(')');
                bool variadic = op == Op::Min || op == Op::Max;
                if (variadic ? args.size() < 2 : args.size() != 1) {
                    pos_ = at;
                    fail("wrong number of arguments to " + id);
                }
                return make(op, std::move(args));
            }
            pos_ = at;
            fail("unknown function '" + id + "'");
        }
        if (id == "pi") return make(Op::Number, {}, std::numbers::pi);
        if (id == "i") return make(Op::ImagUnit);
        auto coord = [&](int axis) {
            if (axis >= 2 * dim_) {
                pos_ = at;
                fail("coordinate '" + id + "' does not exist in dimension " + std::to_string(dim_));
            }
            return make(Op::Coord, {}, 0.0, axis);
        };
        auto var = [&](int k) {
            if (k >= dim_) {
                pos_ = at;
                fail("variable '" + id + "' does not exist in dimension " + std::to_string(dim_));
            }
            return make(Op::Complex, {}, 0.0, k);
        };
        if (id == "x" || id == "x1") return coord(0);
        if (id == "y" || id == "y1") return coord(1);
        if (id == "x2") return coord(2);
        if (id == "y2") return coord(3);
        if (id == "z1") return var(0);
        if (id == "z2") return var(1);
        if (id == "z") {
            if (dim_ != 1) {
                pos_ = at;
                fail("z is a vector in C^2; use |z|, z1 or z2");
            }
            return var(0);
        }
        pos_ = at;
        fail("unknown identifier '" + id + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int dim_;
};

}  // namespace

Expression Expression::parse(std::string_view text, int dim) {
    if (dim != 1 && dim != 2)
        throw Error(ErrorCode::InvalidArgument, "expression dimension must be 1 or 2");
    Expression e;
    e.root_ = Parser(text, dim).parse();
    e.text_ = std::string(text);
    e.dim_ = dim;
    return e;
}

Expression Expression::constant(double value, int dim) {
    Expression e;
    e.root_ = make(Op::Number, {}, value);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    e.text_ = buf;
    e.dim_ = dim;
    return e;
}

double Expression::operator()(std::span<const double> x) const {
    cplx v = root_->eval(x);
    if (v.imag() != 0.0) return kNaN;
    return v.real();
}

}  // namespace pshenv
