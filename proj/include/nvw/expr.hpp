#pragma once

#include <memory>
#include <string>

namespace nvw {

/// Small arithmetic expression in one variable `x`.
/// Grammar: + - * / ^, unary minus, exp sin cos atan sqrt abs log, constants pi and e.
class Expr {
public:
    struct Node;

    /// Throws ParseError on malformed input.
    static Expr parse(const std::string& text);
    static Expr constant(double v);

    double operator()(double x) const;
    /// Symbolic derivative with respect to x.
    Expr derivative() const;
    std::string str() const;
    bool valid() const { return node_ != nullptr; }

private:
    std::shared_ptr<const Node> node_;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

}  // namespace nvw
