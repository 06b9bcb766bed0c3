#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace lifsel {

//! Small arithmetic expression language used for signals and functionals in
//! experiment configs.
//!
//! Variables: x (alias x1), x2 .. x9. Constants: pi, e.
//! Operators: + - * / ^, comparisons (< <= > >= == !=) yielding 0 or 1.
//! Functions: abs sin cos tan exp log sqrt floor ceil sign min max pow.
class Expression {
public:
    static Expression parse(std::string_view text);

    double evaluate(std::span<const double> vars) const;
    double evaluate(double x) const;

    //! Number of coordinates the expression reads (0 for constants).
    std::size_t arity() const noexcept { return arity_; }
    const std::string& source() const noexcept { return source_; }

    struct Node;

private:
    Expression(std::shared_ptr<const Node> root, std::size_t arity, std::string source);

    std::shared_ptr<const Node> root_;
    std::size_t arity_ = 0;
    std::string source_;
};

//! Evaluates a constant expression such as "1/4" or "2^-7".
double evaluate_constant(std::string_view text);

} // namespace lifsel
