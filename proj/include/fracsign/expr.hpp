#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

// Small arithmetic expression language for the coefficient, forcing, and
// Lagrangian slots of problem files.  Variables come from the fixed set
// {t, x, u, z}; each slot narrows that to the subset that makes sense for
// it, so a coefficient g(t) cannot silently capture the state.

namespace fracsign::expr {

namespace detail {
struct Node;
}

// Values for whichever variables an expression may use.  Unset slots count
// as missing and make evaluation fail rather than default to zero.
struct Bindings {
    std::optional<double> t{}, x{}, u{}, z{};
};

// Immutable parsed expression; cheap to copy and safe to share across
// threads.  A default-constructed Expression is empty and cannot be
// evaluated.
class Expression {
public:
    Expression() = default;

    // IEEE double evaluation.  Throws DomainError for ln/sqrt outside their
    // domain, a zero divisor, a negative base raised to a non-integer power,
    // or a referenced variable with no binding.
    double evaluate(const Bindings& b) const;
    double operator()(const Bindings& b) const { return evaluate(b); }

    // Grammar-conforming text that parses back to an equivalent tree.
    std::string str() const;

    // True if the tree mentions the given variable ('t','x','u','z').
    bool references(char var) const;

    bool empty() const { return root_ == nullptr; }

private:
    friend Expression parse(std::string_view, std::string_view);
    std::shared_ptr<const detail::Node> root_;
};

// Parse `src` allowing only the variables listed in `allowed_vars` (a string
// over "txuz", e.g. "t" for coefficient slots).  Throws ParseError with the
// byte offset of the problem on malformed input, unknown identifiers, or
// out-of-context variables.
//
// Grammar (^ right-associative, unary minus binds looser than ^):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
// with functions sin, cos, exp, ln, sqrt, abs, pow and constants pi, e.
Expression parse(std::string_view src, std::string_view allowed_vars);

double evaluate(const Expression& e, const Bindings& b);

} // namespace fracsign::expr
