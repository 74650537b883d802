#include "dacx/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "dacx/errors.hpp"

namespace dacx {

namespace {

enum class Op { Num, VarX, VarY, VarEps, Add, Sub, Mul, Div, Neg, Pow, Exp, Sin, Cos, Log };

} // namespace

struct ParsedFunction::Node {
    Op op = Op::Num;
    double value = 0;
    int ipow = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ParsedFunction::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ParsedFunction::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_num(double v) {
    auto n = std::make_shared<ParsedFunction::Node>();
    n->value = v;
    return n;
}

struct Lexer {
    const std::string &src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string &s) : src(s) {}

    [[noreturn]] void fail(const std::string &msg) const {
        throw schema_error("parse error at line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + msg);
    }
    void advance() {
        if (pos < src.size()) {
            if (src[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++pos;
        }
    }
    void skip_ws() {
        while (pos < src.size() && std::isspace((unsigned char)src[pos]))
            advance();
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        skip_ws();
        std::string s;
        while (pos < src.size() && (std::isalnum((unsigned char)src[pos]) || src[pos] == '_')) {
            s.push_back(src[pos]);
            advance();
        }
        return s;
    }
    double number() {
        skip_ws();
        size_t start = pos;
        char *end = nullptr;
        double v = std::strtod(src.c_str() + start, &end);
        if (end == src.c_str() + start)
            fail("expected a number");
        while (pos < src.size() && src.c_str() + pos != end)
            advance();
        return v;
    }
};

struct Parser {
    Lexer lex;
    bool allow_y_eps;

    Parser(const std::string &s, bool yeps) : lex(s), allow_y_eps(yeps) {}

    NodePtr parse() {
        NodePtr e = expr();
        lex.skip_ws();
        if (lex.pos != lex.src.size())
            lex.fail("unexpected trailing input");
        return e;
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (lex.accept('+'))
                e = make(Op::Add, e, term());
            else if (lex.accept('-'))
                e = make(Op::Sub, e, term());
            else
                return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (lex.accept('*'))
                e = make(Op::Mul, e, unary());
            else if (lex.accept('/'))
                e = make(Op::Div, e, unary());
            else
                return e;
        }
    }

    NodePtr unary() {
        if (lex.accept('-'))
            return make(Op::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (lex.accept('^')) {
            int e = int_exponent();
            auto n = std::make_shared<ParsedFunction::Node>();
            n->op = Op::Pow;
            n->ipow = e;
            n->a = base;
            return n;
        }
        return base;
    }

    // ^ is right-associative over integer exponents: x^2^3 = x^(2^3).
    int int_exponent() {
        bool neg = false;
        while (lex.accept('-'))
            neg = !neg;
        lex.skip_ws();
        if (!std::isdigit((unsigned char)lex.peek()))
            lex.fail("integer exponent expected after '^'");
        double v = lex.number();
        long iv = std::lround(v);
        if ((double)iv != v)
            lex.fail("exponent must be an integer");
        int e = (int)(neg ? -iv : iv);
        if (lex.accept('^')) {
            int f = int_exponent();
            if (f < 0)
                lex.fail("nested exponent must be nonnegative");
            long r = 1;
            for (int i = 0; i < f; ++i) {
                r *= e;
                if (std::abs(r) > 1000000)
                    lex.fail("exponent overflow");
            }
            e = (int)r;
        }
        return e;
    }

    NodePtr atom() {
        char c = lex.peek();
        if (c == '(') {
            lex.advance();
            NodePtr e = expr();
            lex.expect(')');
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.')
            return make_num(lex.number());
        if (std::isalpha((unsigned char)c)) {
            std::string id = lex.ident();
            if (id == "x")
                return make(Op::VarX);
            if (id == "y") {
                if (!allow_y_eps)
                    lex.fail("variable 'y' is not allowed here");
                return make(Op::VarY);
            }
            if (id == "eps") {
                if (!allow_y_eps)
                    lex.fail("variable 'eps' is not allowed here");
                return make(Op::VarEps);
            }
            if (id == "exp" || id == "sin" || id == "cos" || id == "log") {
                lex.expect('(');
                NodePtr arg = expr();
                lex.expect(')');
                Op op = id == "exp"   ? Op::Exp
                        : id == "sin" ? Op::Sin
                        : id == "cos" ? Op::Cos
                                      : Op::Log;
                return make(op, arg);
            }
            lex.fail("unknown identifier '" + id + "'");
        }
        lex.fail("unexpected character");
    }
};

double eval_node(const ParsedFunction::Node &n, double x, double y, double eps) {
    switch (n.op) {
    case Op::Num:
        return n.value;
    case Op::VarX:
        return x;
    case Op::VarY:
        return y;
    case Op::VarEps:
        return eps;
    case Op::Add:
        return eval_node(*n.a, x, y, eps) + eval_node(*n.b, x, y, eps);
    case Op::Sub:
        return eval_node(*n.a, x, y, eps) - eval_node(*n.b, x, y, eps);
    case Op::Mul:
        return eval_node(*n.a, x, y, eps) * eval_node(*n.b, x, y, eps);
    case Op::Div:
        return eval_node(*n.a, x, y, eps) / eval_node(*n.b, x, y, eps);
    case Op::Neg:
        return -eval_node(*n.a, x, y, eps);
    case Op::Pow:
        return std::pow(eval_node(*n.a, x, y, eps), (double)n.ipow);
    case Op::Exp:
        return std::exp(eval_node(*n.a, x, y, eps));
    case Op::Sin:
        return std::sin(eval_node(*n.a, x, y, eps));
    case Op::Cos:
        return std::cos(eval_node(*n.a, x, y, eps));
    case Op::Log:
        return std::log(eval_node(*n.a, x, y, eps));
    }
    return 0;
}

// Dense trivariate jet truncated at degree ord per variable; univariate
// Taylor reuses it with the y/eps dimensions collapsed.
struct Jet {
    int ord;
    std::vector<double> c; // size ord^3

    explicit Jet(int o) : ord(o), c((size_t)o * o * o, 0.0) {}
    double &at(int j, int k, int l) { return c[((size_t)j * ord + k) * ord + l]; }
    double at(int j, int k, int l) const { return c[((size_t)j * ord + k) * ord + l]; }

    static Jet constant(int o, double v) {
        Jet r(o);
        r.at(0, 0, 0) = v;
        return r;
    }
    static Jet var(int o, int which) {
        Jet r(o);
        if (o > 1) {
            if (which == 0)
                r.at(1, 0, 0) = 1;
            else if (which == 1)
                r.at(0, 1, 0) = 1;
            else
                r.at(0, 0, 1) = 1;
        }
        return r;
    }
    Jet operator+(const Jet &o) const {
        Jet r(ord);
        for (size_t i = 0; i < c.size(); ++i)
            r.c[i] = c[i] + o.c[i];
        return r;
    }
    Jet operator-(const Jet &o) const {
        Jet r(ord);
        for (size_t i = 0; i < c.size(); ++i)
            r.c[i] = c[i] - o.c[i];
        return r;
    }
    Jet neg() const {
        Jet r(ord);
        for (size_t i = 0; i < c.size(); ++i)
            r.c[i] = -c[i];
        return r;
    }
    Jet operator*(const Jet &o) const {
        Jet r(ord);
        for (int j = 0; j < ord; ++j)
            for (int k = 0; k < ord; ++k)
                for (int l = 0; l < ord; ++l) {
                    double v = at(j, k, l);
                    if (v == 0)
                        continue;
                    for (int j2 = 0; j + j2 < ord; ++j2)
                        for (int k2 = 0; k + k2 < ord; ++k2)
                            for (int l2 = 0; l + l2 < ord; ++l2) {
                                double w = o.at(j2, k2, l2);
                                if (w != 0)
                                    r.at(j + j2, k + k2, l + l2) += v * w;
                            }
                }
        return r;
    }
    // composition with a univariate Taylor series f around this jet's constant
    Jet compose_univariate(const std::vector<double> &f) const {
        Jet dev = *this;
        dev.at(0, 0, 0) = 0;
        Jet acc = Jet::constant(ord, 0.0);
        Jet pw = Jet::constant(ord, 1.0);
        int terms = 3 * ord + 1;
        for (int i = 0; i < (int)f.size() && i < terms; ++i) {
            if (f[(size_t)i] != 0) {
                for (size_t q = 0; q < acc.c.size(); ++q)
                    acc.c[q] += f[(size_t)i] * pw.c[q];
            }
            if (i + 1 < (int)f.size() && i + 1 < terms)
                pw = pw * dev;
        }
        return acc;
    }
};

std::vector<double> reciprocal_series(double c0, size_t len) {
    std::vector<double> inv(len);
    double cp = 1.0 / c0;
    for (size_t i = 0; i < len; ++i) {
        inv[i] = (i % 2 ? -cp : cp);
        cp /= c0;
    }
    return inv;
}

Jet jet_node(const ParsedFunction::Node &n, int ord) {
    switch (n.op) {
    case Op::Num:
        return Jet::constant(ord, n.value);
    case Op::VarX:
        return Jet::var(ord, 0);
    case Op::VarY:
        return Jet::var(ord, 1);
    case Op::VarEps:
        return Jet::var(ord, 2);
    case Op::Add:
        return jet_node(*n.a, ord) + jet_node(*n.b, ord);
    case Op::Sub:
        return jet_node(*n.a, ord) - jet_node(*n.b, ord);
    case Op::Neg:
        return jet_node(*n.a, ord).neg();
    case Op::Mul:
        return jet_node(*n.a, ord) * jet_node(*n.b, ord);
    case Op::Div: {
        Jet num = jet_node(*n.a, ord), den = jet_node(*n.b, ord);
        double d0 = den.at(0, 0, 0);
        if (d0 == 0)
            throw domain_error("Taylor at 0: division by a function vanishing at 0");
        return num * den.compose_univariate(reciprocal_series(d0, 3 * (size_t)ord + 1));
    }
    case Op::Pow: {
        Jet b = jet_node(*n.a, ord);
        int e = n.ipow;
        if (e < 0) {
            double b0 = b.at(0, 0, 0);
            if (b0 == 0)
                throw domain_error("Taylor at 0: negative power of a function vanishing at 0");
            b = b.compose_univariate(reciprocal_series(b0, 3 * (size_t)ord + 1));
            e = -e;
        }
        Jet r = Jet::constant(ord, 1.0);
        for (int i = 0; i < e; ++i)
            r = r * b;
        return r;
    }
    case Op::Exp: {
        Jet a = jet_node(*n.a, ord);
        std::vector<double> f(3 * (size_t)ord + 1);
        double e0 = std::exp(a.at(0, 0, 0)), fac = 1;
        for (size_t i = 0; i < f.size(); ++i) {
            f[i] = e0 / fac;
            fac *= (double)(i + 1);
        }
        return a.compose_univariate(f);
    }
    case Op::Sin:
    case Op::Cos: {
        Jet a = jet_node(*n.a, ord);
        double c0 = a.at(0, 0, 0);
        std::vector<double> f(3 * (size_t)ord + 1);
        double s = std::sin(c0), cs = std::cos(c0), fac = 1;
        for (size_t i = 0; i < f.size(); ++i) {
            double d;
            int phase = (int)(i % 4);
            if (n.op == Op::Sin)
                d = phase == 0 ? s : phase == 1 ? cs : phase == 2 ? -s : -cs;
            else
                d = phase == 0 ? cs : phase == 1 ? -s : phase == 2 ? -cs : s;
            f[i] = d / fac;
            fac *= (double)(i + 1);
        }
        return a.compose_univariate(f);
    }
    case Op::Log: {
        Jet a = jet_node(*n.a, ord);
        double c0 = a.at(0, 0, 0);
        if (c0 <= 0)
            throw domain_error("Taylor at 0: log of a function with nonpositive value at 0");
        std::vector<double> f(3 * (size_t)ord + 1);
        f[0] = std::log(c0);
        double cp = 1.0 / c0;
        for (size_t i = 1; i < f.size(); ++i) {
            f[i] = (i % 2 ? cp : -cp) / (double)i;
            cp /= c0;
        }
        return a.compose_univariate(f);
    }
    }
    return Jet::constant(ord, 0.0);
}

void pretty_node(const ParsedFunction::Node &n, std::string &out, int parent_prec) {
    // precedence: 0 add, 1 mul, 2 unary-, 3 pow, 4 atom
    auto wrap = [&](int prec, const std::function<void()> &body) {
        bool paren = prec < parent_prec;
        if (paren)
            out += "(";
        body();
        if (paren)
            out += ")";
    };
    switch (n.op) {
    case Op::Num: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        if (n.value < 0)
            wrap(2, [&] { out += buf; });
        else
            out += buf;
        return;
    }
    case Op::VarX:
        out += "x";
        return;
    case Op::VarY:
        out += "y";
        return;
    case Op::VarEps:
        out += "eps";
        return;
    case Op::Add:
        wrap(0, [&] {
            pretty_node(*n.a, out, 0);
            out += " + ";
            pretty_node(*n.b, out, 1);
        });
        return;
    case Op::Sub:
        wrap(0, [&] {
            pretty_node(*n.a, out, 0);
            out += " - ";
            pretty_node(*n.b, out, 1);
        });
        return;
    case Op::Mul:
        wrap(1, [&] {
            pretty_node(*n.a, out, 1);
            out += "*";
            pretty_node(*n.b, out, 2);
        });
        return;
    case Op::Div:
        wrap(1, [&] {
            pretty_node(*n.a, out, 1);
            out += "/";
            pretty_node(*n.b, out, 2);
        });
        return;
    case Op::Neg:
        wrap(2, [&] {
            out += "-";
            pretty_node(*n.a, out, 2);
        });
        return;
    case Op::Pow:
        wrap(3, [&] {
            pretty_node(*n.a, out, 4);
            out += "^";
            out += std::to_string(n.ipow);
        });
        return;
    case Op::Exp:
    case Op::Sin:
    case Op::Cos:
    case Op::Log:
        out += n.op == Op::Exp ? "exp" : n.op == Op::Sin ? "sin" : n.op == Op::Cos ? "cos" : "log";
        out += "(";
        pretty_node(*n.a, out, 0);
        out += ")";
        return;
    }
}

bool node_uses(const ParsedFunction::Node &n, Op what) {
    if (n.op == what)
        return true;
    if (n.a && node_uses(*n.a, what))
        return true;
    if (n.b && node_uses(*n.b, what))
        return true;
    return false;
}

} // namespace

ParsedFunction ParsedFunction::parse(const std::string &src, bool allow_y_eps) {
    Parser p(src, allow_y_eps);
    ParsedFunction f;
    f.root_ = p.parse();
    return f;
}

double ParsedFunction::eval(double x) const { return eval_node(*root_, x, 0, 0); }
double ParsedFunction::eval3(double x, double y, double eps) const {
    return eval_node(*root_, x, y, eps);
}

std::vector<double> ParsedFunction::taylor(int order) const {
    if (uses_y() || uses_eps())
        throw domain_error("taylor: expression is not univariate in x");
    Jet j = jet_node(*root_, std::max(1, order));
    std::vector<double> out((size_t)order, 0.0);
    for (int i = 0; i < order && i < j.ord; ++i)
        out[(size_t)i] = j.at(i, 0, 0);
    return out;
}

std::vector<std::vector<std::vector<double>>> ParsedFunction::taylor3(int order) const {
    Jet j = jet_node(*root_, std::max(1, order));
    std::vector<std::vector<std::vector<double>>> out(
        (size_t)order, std::vector<std::vector<double>>((size_t)order,
                                                        std::vector<double>((size_t)order, 0.0)));
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b)
            for (int c = 0; c < order; ++c)
                out[(size_t)a][(size_t)b][(size_t)c] = j.at(a, b, c);
    return out;
}

std::string ParsedFunction::pretty() const {
    std::string out;
    pretty_node(*root_, out, 0);
    return out;
}

bool ParsedFunction::uses_y() const { return node_uses(*root_, Op::VarY); }
bool ParsedFunction::uses_eps() const { return node_uses(*root_, Op::VarEps); }

void ParsedFunction::check_consistency(double tol) const {
    if (uses_y() || uses_eps())
        return;
    auto t = taylor(3);
    double f0 = eval(0.0);
    if (std::abs(f0 - t[0]) > tol * (1 + std::abs(f0)))
        throw numeric_error("Taylor data disagrees with the evaluator at 0");
    double h = 1e-5;
    double d1 = (eval(h) - eval(-h)) / (2 * h);
    if (t.size() > 1 && std::abs(d1 - t[1]) > std::max(tol, tol * std::abs(d1)))
        throw numeric_error("Taylor derivative disagrees with the evaluator at 0");
}

} // namespace dacx
