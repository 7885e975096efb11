#include "fracsign/expr.hpp"

#include "fracsign/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <system_error>

namespace fracsign::expr {

namespace detail {

enum class Func : unsigned char { sin, cos, exp, ln, sqrt, abs, pow };

struct Node {
    enum class Kind : unsigned char {
        number,
        constant, // named constant, prints by name
        variable,
        negate,
        add,
        sub,
        mul,
        div,
        pow, // the ^ operator; Func::pow calls share its evaluation
        call
    };

    Kind kind;
    double value = 0.0; // number / constant
    char name = 0;      // variable letter; 'p' or 'e' for constants
    Func func = Func::sin;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = v;
    return n;
}

NodePtr make_binary(Node::Kind k, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

constexpr std::array<FuncInfo, 7> kFuncs = {{
    {"sin", Func::sin, 1},
    {"cos", Func::cos, 1},
    {"exp", Func::exp, 1},
    {"ln", Func::ln, 1},
    {"sqrt", Func::sqrt, 1},
    {"abs", Func::abs, 1},
    {"pow", Func::pow, 2},
}};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

class Parser {
public:
    Parser(std::string_view src, std::string_view allowed) : src_(src), allowed_(allowed) {}

    NodePtr run() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", 0);
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input '" + std::string(1, src_[pos_]) + "'",
                             pos_);
        return e;
    }

private:
    std::string_view src_;
    std::string_view allowed_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                src_[pos_] == '\r'))
            ++pos_;
    }

    // Consumes c if it is the next token; never throws.
    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected ") + what, pos_);
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (accept('+'))
                left = make_binary(Node::Kind::add, std::move(left), term());
            else if (accept('-'))
                left = make_binary(Node::Kind::sub, std::move(left), term());
            else
                return left;
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*'))
                left = make_binary(Node::Kind::mul, std::move(left), unary());
            else if (accept('/'))
                left = make_binary(Node::Kind::div, std::move(left), unary());
            else
                return left;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::negate;
            n->lhs = unary();
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        // right-associative; the exponent may start with a unary minus
        if (accept('^')) return make_binary(Node::Kind::pow, std::move(base), unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("expected a value", pos_);
        char c = src_[pos_];

        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            expect(')', "')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if (is_ident_start(c)) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        double v = 0.0;
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) throw ParseError("malformed number", pos_);
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        return make_number(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);

        if (name == "pi" || name == "e") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::constant;
            n->name = name[0];
            n->value = (name == "pi") ? 3.14159265358979323846 : 2.71828182845904523536;
            return n;
        }

        for (const auto& f : kFuncs) {
            if (name != f.name) continue;
            expect('(', "'(' after function name");
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::call;
            n->func = f.func;
            n->lhs = expr();
            int got = 1;
            while (accept(',')) {
                if (got == 1 && f.arity == 2)
                    n->rhs = expr();
                else
                    expr(); // parse and discard so the arity error points past it
                ++got;
            }
            expect(')', "')'");
            if (got != f.arity)
                throw ParseError("function '" + std::string(name) + "' expects " +
                                     std::to_string(f.arity) + " argument(s), got " +
                                     std::to_string(got),
                                 start);
            return n;
        }

        if (name.size() == 1 && std::string_view("txuz").find(name[0]) != std::string_view::npos) {
            if (allowed_.find(name[0]) == std::string_view::npos)
                throw ParseError("variable '" + std::string(name) +
                                     "' is not available in this context",
                                 start);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::variable;
            n->name = name[0];
            return n;
        }

        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
};

double binding_for(char var, const Bindings& b) {
    const std::optional<double>* slot = nullptr;
    switch (var) {
        case 't': slot = &b.t; break;
        case 'x': slot = &b.x; break;
        case 'u': slot = &b.u; break;
        case 'z': slot = &b.z; break;
        default: break;
    }
    if (slot == nullptr || !slot->has_value())
        throw DomainError(std::string("evaluate: no binding for variable '") + var + "'");
    return **slot;
}

double eval_pow(double base, double expo) {
    if (base < 0.0 && expo != std::nearbyint(expo))
        throw DomainError("evaluate: negative base " + std::to_string(base) +
                          " raised to non-integer power " + std::to_string(expo));
    if (base == 0.0 && expo < 0.0) throw DomainError("evaluate: zero raised to a negative power");
    return std::pow(base, expo);
}

double eval_node(const Node& n, const Bindings& b) {
    switch (n.kind) {
        case Node::Kind::number:
        case Node::Kind::constant: return n.value;
        case Node::Kind::variable: return binding_for(n.name, b);
        case Node::Kind::negate: return -eval_node(*n.lhs, b);
        case Node::Kind::add: return eval_node(*n.lhs, b) + eval_node(*n.rhs, b);
        case Node::Kind::sub: return eval_node(*n.lhs, b) - eval_node(*n.rhs, b);
        case Node::Kind::mul: return eval_node(*n.lhs, b) * eval_node(*n.rhs, b);
        case Node::Kind::div: {
            double num = eval_node(*n.lhs, b);
            double den = eval_node(*n.rhs, b);
            if (den == 0.0) throw DomainError("evaluate: division by zero");
            return num / den;
        }
        case Node::Kind::pow: return eval_pow(eval_node(*n.lhs, b), eval_node(*n.rhs, b));
        case Node::Kind::call: {
            double a = eval_node(*n.lhs, b);
            switch (n.func) {
                case Func::sin: return std::sin(a);
                case Func::cos: return std::cos(a);
                case Func::exp: return std::exp(a);
                case Func::ln:
                    if (a <= 0.0)
                        throw DomainError("evaluate: ln of non-positive value " +
                                          std::to_string(a));
                    return std::log(a);
                case Func::sqrt:
                    if (a < 0.0)
                        throw DomainError("evaluate: sqrt of negative value " + std::to_string(a));
                    return std::sqrt(a);
                case Func::abs: return std::abs(a);
                case Func::pow: return eval_pow(a, eval_node(*n.rhs, b));
            }
            break;
        }
    }
    throw DomainError("evaluate: corrupt expression tree");
}

// Precedence bands for minimal-parenthesis printing; must mirror the parser.
constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

void print_number(std::string& out, double v) {
    // shortest text that reparses to the same double
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    out.append(buf.data(), ptr);
}

void print_node(std::string& out, const Node& n, int parent_prec) {
    const auto wrap = [&](int my_prec, auto&& body) {
        if (my_prec < parent_prec) {
            out += '(';
            body();
            out += ')';
        } else {
            body();
        }
    };

    switch (n.kind) {
        case Node::Kind::number: print_number(out, n.value); return;
        case Node::Kind::constant: out += (n.name == 'p') ? "pi" : "e"; return;
        case Node::Kind::variable: out += n.name; return;
        case Node::Kind::negate:
            wrap(kPrecNeg, [&] {
                out += '-';
                print_node(out, *n.lhs, kPrecNeg);
            });
            return;
        case Node::Kind::add:
            wrap(kPrecAdd, [&] {
                print_node(out, *n.lhs, kPrecAdd);
                out += " + ";
                print_node(out, *n.rhs, kPrecAdd + 1);
            });
            return;
        case Node::Kind::sub:
            wrap(kPrecAdd, [&] {
                print_node(out, *n.lhs, kPrecAdd);
                out += " - ";
                print_node(out, *n.rhs, kPrecAdd + 1);
            });
            return;
        case Node::Kind::mul:
            wrap(kPrecMul, [&] {
                print_node(out, *n.lhs, kPrecMul);
                out += "*";
                print_node(out, *n.rhs, kPrecMul + 1);
            });
            return;
        case Node::Kind::div:
            wrap(kPrecMul, [&] {
                print_node(out, *n.lhs, kPrecMul);
                out += "/";
                print_node(out, *n.rhs, kPrecMul + 1);
            });
            return;
        case Node::Kind::pow:
            wrap(kPrecPow, [&] {
                print_node(out, *n.lhs, kPrecPow + 1);
                out += "^";
                // exponent side re-enters through unary, so negation augments
                // without parentheses
                print_node(out, *n.rhs, kPrecNeg);
            });
            return;
        case Node::Kind::call: {
            for (const auto& f : kFuncs) {
                if (f.func != n.func) continue;
                out += f.name;
                out += '(';
                print_node(out, *n.lhs, 0);
                if (f.arity == 2) {
                    out += ", ";
                    print_node(out, *n.rhs, 0);
                }
                out += ')';
                return;
            }
            return;
        }
    }
}

bool node_references(const Node& n, char var) {
    if (n.kind == Node::Kind::variable) return n.name == var;
    if (n.lhs && node_references(*n.lhs, var)) return true;
    if (n.rhs && node_references(*n.rhs, var)) return true;
    return false;
}

} // namespace

} // namespace detail

double Expression::evaluate(const Bindings& b) const {
    if (!root_) throw DomainError("evaluate: empty expression");
    return detail::eval_node(*root_, b);
}

std::string Expression::str() const {
    if (!root_) return "";
    std::string out;
    detail::print_node(out, *root_, 0);
    return out;
}

bool Expression::references(char var) const {
    return root_ && detail::node_references(*root_, var);
}

Expression parse(std::string_view src, std::string_view allowed_vars) {
    detail::Parser p(src, allowed_vars);
    Expression e;
    e.root_ = p.run();
    return e;
}

double evaluate(const Expression& e, const Bindings& b) { return e.evaluate(b); }

} // namespace fracsign::expr
