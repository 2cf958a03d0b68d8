#include "nvw/expr.hpp"

#include "nvw/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace nvw {

enum class Op { num, var, neg, add, sub, mul, div, pow, fn };
enum class Fn { exp, sin, cos, atan, sqrt, abs, log };

struct Expr::Node {
    Op op;
    double value = 0;
    Fn fn = Fn::exp;
    std::shared_ptr<const Node> a, b;
};

namespace {

using P = std::shared_ptr<const Expr::Node>;

P mk_num(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::num;
    n->value = v;
    return n;
}
P mk_var() {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::var;
    return n;
}
bool is_num(const P& p, double v) { return p->op == Op::num && p->value == v; }

P mk(Op op, P a, P b = nullptr) {
    // light simplification keeps derivative trees small
    if (op == Op::add) {
        if (is_num(a, 0)) return b;
        if (is_num(b, 0)) return a;
    } else if (op == Op::sub) {
        if (is_num(b, 0)) return a;
    } else if (op == Op::mul) {
        if (is_num(a, 0) || is_num(b, 0)) return mk_num(0);
        if (is_num(a, 1)) return b;
        if (is_num(b, 1)) return a;
    } else if (op == Op::div) {
        if (is_num(a, 0)) return mk_num(0);
        if (is_num(b, 1)) return a;
    } else if (op == Op::neg) {
        if (a->op == Op::num) return mk_num(-a->value);
    }
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
P mk_fn(Fn f, P a) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::fn;
    n->fn = f;
    n->a = std::move(a);
    return n;
}

double eval(const Expr::Node& n, double x) {
    switch (n.op) {
    case Op::num: return n.value;
    case Op::var: return x;
    case Op::neg: return -eval(*n.a, x);
    case Op::add: return eval(*n.a, x) + eval(*n.b, x);
    case Op::sub: return eval(*n.a, x) - eval(*n.b, x);
    case Op::mul: return eval(*n.a, x) * eval(*n.b, x);
    case Op::div: return eval(*n.a, x) / eval(*n.b, x);
    case Op::pow: {
        double base = eval(*n.a, x);
        if (n.b->op == Op::num) {
            double e = n.b->value;
            if (e == 2) return base * base;
            if (e == std::round(e) && std::abs(e) <= 16) {
                double r = 1;
                for (int k = 0; k < static_cast<int>(std::abs(e)); ++k) r *= base;
                return e < 0 ? 1 / r : r;
            }
        }
        return std::pow(base, eval(*n.b, x));
    }
    case Op::fn: {
        double v = eval(*n.a, x);
        switch (n.fn) {
        case Fn::exp: return std::exp(v);
        case Fn::sin: return std::sin(v);
        case Fn::cos: return std::cos(v);
        case Fn::atan: return std::atan(v);
        case Fn::sqrt: return std::sqrt(v);
        case Fn::abs: return std::abs(v);
        case Fn::log: return std::log(v);
        }
    }
    }
    return 0;
}

P deriv(const P& n) {
    switch (n->op) {
    case Op::num: return mk_num(0);
    case Op::var: return mk_num(1);
    case Op::neg: return mk(Op::neg, deriv(n->a));
    case Op::add: return mk(Op::add, deriv(n->a), deriv(n->b));
    case Op::sub: return mk(Op::sub, deriv(n->a), deriv(n->b));
    case Op::mul:
        return mk(Op::add, mk(Op::mul, deriv(n->a), n->b), mk(Op::mul, n->a, deriv(n->b)));
    case Op::div:
        return mk(Op::div, mk(Op::sub, mk(Op::mul, deriv(n->a), n->b), mk(Op::mul, n->a, deriv(n->b))),
                  mk(Op::pow, n->b, mk_num(2)));
    case Op::pow: {
        if (n->b->op == Op::num) {
            double e = n->b->value;
            return mk(Op::mul, mk(Op::mul, mk_num(e), mk(Op::pow, n->a, mk_num(e - 1))), deriv(n->a));
        }
        // d(a^b) = a^b (b' log a + b a'/a)
        return mk(Op::mul, n,
                  mk(Op::add, mk(Op::mul, deriv(n->b), mk_fn(Fn::log, n->a)),
                     mk(Op::div, mk(Op::mul, n->b, deriv(n->a)), n->a)));
    }
    case Op::fn: {
        P da = deriv(n->a);
        if (is_num(da, 0)) return da;
        P outer;
        switch (n->fn) {
        case Fn::exp: outer = n; break;
        case Fn::sin: outer = mk_fn(Fn::cos, n->a); break;
        case Fn::cos: outer = mk(Op::neg, mk_fn(Fn::sin, n->a)); break;
        case Fn::atan: outer = mk(Op::div, mk_num(1), mk(Op::add, mk_num(1), mk(Op::pow, n->a, mk_num(2)))); break;
        case Fn::sqrt: outer = mk(Op::div, mk_num(0.5), n); break;
        case Fn::abs: outer = mk(Op::div, n->a, n); break;
        case Fn::log: outer = mk(Op::div, mk_num(1), n->a); break;
        }
        return mk(Op::mul, outer, da);
    }
    }
    return mk_num(0);
}

const char* fn_name(Fn f) {
    switch (f) {
    case Fn::exp: return "exp";
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::atan: return "atan";
    case Fn::sqrt: return "sqrt";
    case Fn::abs: return "abs";
    case Fn::log: return "log";
    }
    return "?";
}

void print(const Expr::Node& n, std::ostringstream& os) {
    switch (n.op) {
    case Op::num: os << n.value; return;
    case Op::var: os << "x"; return;
    case Op::neg: os << "(-"; print(*n.a, os); os << ")"; return;
    case Op::fn: os << fn_name(n.fn) << "("; print(*n.a, os); os << ")"; return;
    default: break;
    }
    const char* sym = n.op == Op::add ? "+" : n.op == Op::sub ? "-" : n.op == Op::mul ? "*" : n.op == Op::div ? "/" : "^";
    os << "(";
    print(*n.a, os);
    os << sym;
    print(*n.b, os);
    os << ")";
}

// Recursive descent: expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
// unary := '-' unary | power; power := atom ('^' unary)?
class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    P parse() {
        P e = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("expression '" + s_ + "': " + what + " at position " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    P expr() {
        P a = term();
        for (;;) {
            if (eat('+')) a = mk(Op::add, a, term());
            else if (eat('-')) a = mk(Op::sub, a, term());
            else return a;
        }
    }
    P term() {
        P a = unary();
        for (;;) {
            if (eat('*')) a = mk(Op::mul, a, unary());
            else if (eat('/')) a = mk(Op::div, a, unary());
            else return a;
        }
    }
    P unary() {
        if (eat('-')) return mk(Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    P power() {
        P a = atom();
        if (eat('^')) return mk(Op::pow, a, unary());
        return a;
    }
    P atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            P e = expr();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + i_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            i_ += static_cast<std::size_t>(end - begin);
            return mk_num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
            std::string id = s_.substr(i_, j - i_);
            i_ = j;
            if (id == "x") return mk_var();
            if (id == "pi") return mk_num(M_PI);
            if (id == "e") return mk_num(M_E);
            static const std::pair<const char*, Fn> fns[] = {{"exp", Fn::exp},   {"sin", Fn::sin},   {"cos", Fn::cos},
                                                             {"atan", Fn::atan}, {"sqrt", Fn::sqrt}, {"abs", Fn::abs},
                                                             {"log", Fn::log}};
            for (const auto& [name, f] : fns) {
                if (id == name) {
                    if (!eat('(')) fail("expected '(' after " + id);
                    P arg = expr();
                    if (!eat(')')) fail("missing ')'");
                    return mk_fn(f, arg);
                }
            }
            fail("unknown identifier '" + id + "'");
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).parse()); }

Expr Expr::constant(double v) { return Expr(mk_num(v)); }

double Expr::operator()(double x) const {
    if (!node_) throw UsageError("evaluating an empty expression");
    return eval(*node_, x);
}

Expr Expr::derivative() const {
    if (!node_) throw UsageError("differentiating an empty expression");
    return Expr(deriv(node_));
}

std::string Expr::str() const {
    if (!node_) return "";
    std::ostringstream os;
    os.precision(17);
    print(*node_, os);
    return os.str();
}

}  // namespace nvw
