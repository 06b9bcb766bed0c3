#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lifsel/signal.hpp"

namespace lifsel {

//! s^(r)(x0). Built-in bases support r = 0 only.
struct PointEval {
    std::vector<double> x0;
    int r = 0;
};

//! (1/H) * integral of s over [a, b], H = b - a.
struct IntervalMean {
    double a = 0.0;
    double b = 1.0;
    double length() const noexcept { return b - a; }
};

//! integral over [0,1] of s * g.
struct IntegralAgainstG {
    std::string name;
    std::function<double(double)> g;
};

//! Raw T(phi_l) vectors per model, for functionals the library cannot
//! evaluate itself (derivatives, foreign bases).
struct CustomFunctional {
    std::vector<std::vector<double>> values;
    std::optional<double> truth;
};

class FunctionalSpec {
public:
    using Kind = std::variant<PointEval, IntervalMean, IntegralAgainstG, CustomFunctional>;

    static FunctionalSpec point(double x0, int r = 0);
    static FunctionalSpec point(std::vector<double> x0, int r = 0);
    static FunctionalSpec interval(double a, double b);
    static FunctionalSpec integral(std::string name, std::function<double(double)> g);
    //! "g1" (cos 64 pi x) or "g2" (cos 4 pi x).
    static FunctionalSpec named(const std::string& name);
    static FunctionalSpec custom(std::vector<std::vector<double>> values, std::optional<double> truth = std::nullopt,
                                 std::size_t dimension = 1);

    const Kind& kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dimension_; }

    //! Report labels: kind column ("point", "interval", "g1", ...) and its
    //! argument ("1/4", "0;1/128", "-").
    const std::string& kind_name() const noexcept { return kind_name_; }
    const std::string& argument() const noexcept { return argument_; }
    FunctionalSpec& with_argument(std::string argument);

    bool is_point() const noexcept { return std::holds_alternative<PointEval>(kind_); }
    bool is_integral() const noexcept
    {
        return std::holds_alternative<IntervalMean>(kind_) || std::holds_alternative<IntegralAgainstG>(kind_);
    }

    //! Integral kinds: the weight g. Intervals are right-closed like the Haar
    //! cells, (a, b], and include 0 when a = 0.
    double weight(double x) const;

private:
    FunctionalSpec(Kind kind, std::size_t dimension, std::string kind_name, std::string argument);

    Kind kind_;
    std::size_t dimension_;
    std::string kind_name_;
    std::string argument_;
};

//! Parses "point(1/4)", "point(0.3, 0.7)", "interval(0, 1/32)", "g1", "g2"
//! or "integral(<expression in x>)".
FunctionalSpec parse_functional(const std::string& text);

std::function<double(double)> named_g(const std::string& name);

//! Reference value T(s): direct evaluation for points, composite midpoint
//! quadrature at the signal's truth depth otherwise.
double truth_functional(const Signal& signal, const FunctionalSpec& functional);

//! integral of g over each cell ((i-1)/n, i/n], i = 1..n. Exact for
//! intervals, midpoint quadrature with 2^depth total panels otherwise.
std::vector<double> cell_integrals(const FunctionalSpec& functional, std::size_t n, int depth = 16);

} // namespace lifsel
