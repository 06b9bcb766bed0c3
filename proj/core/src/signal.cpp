#include "lifsel/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lifsel {

Signal::Signal(std::string id, std::size_t dimension, Function eval, int truth_quadrature_depth)
    : id_(std::move(id)), dimension_(dimension), eval_(std::move(eval)), depth_(truth_quadrature_depth)
{
    if (dimension_ == 0)
        throw std::invalid_argument("signal '" + id_ + "': dimension must be positive");
    if (!eval_)
        throw std::invalid_argument("signal '" + id_ + "': empty evaluation function");
    if (depth_ < 1 || depth_ > 24)
        throw std::invalid_argument("signal '" + id_ + "': truth_quadrature_depth must lie in [1, 24]");
}

Signal Signal::univariate(std::string id, std::function<double(double)> eval, int truth_quadrature_depth)
{
    if (!eval)
        throw std::invalid_argument("signal '" + id + "': empty evaluation function");
    return Signal(std::move(id), 1,
                  [f = std::move(eval)](std::span<const double> x) { return f(x[0]); },
                  truth_quadrature_depth);
}

double Signal::operator()(double x) const
{
    if (dimension_ != 1)
        throw std::invalid_argument("signal '" + id_ + "' is multivariate");
    return eval_(std::span<const double>(&x, 1));
}

double Signal::operator()(std::span<const double> x) const
{
    if (x.size() != dimension_)
        throw std::invalid_argument("signal '" + id_ + "': point has wrong dimension");
    return eval_(x);
}

namespace signals {

double s1(double x)
{
    return (x * x * x * x - x) * std::sin(6.0 * x);
}

double s2(double x)
{
    return std::exp(-30.0 * std::abs(x - 0.75)) + std::exp(-30.0 * std::abs(x - 0.25));
}

double s3(double x)
{
    constexpr double pi = std::numbers::pi;
    if (x > 0.0 && x <= 2.0 / 3.0)
        return x * std::cos(2.0 * pi * x);
    if (x > 2.0 / 3.0 && x <= 1.0)
        return x * x * std::cos(15.0 * pi * x);
    return 0.0;
}

} // namespace signals

bool is_builtin_signal(std::string_view name)
{
    return name == "s1" || name == "s2" || name == "s3";
}

Signal builtin_signal(std::string_view name)
{
    if (name == "s1")
        return Signal::univariate("s1", signals::s1);
    if (name == "s2")
        return Signal::univariate("s2", signals::s2);
    if (name == "s3")
        return Signal::univariate("s3", signals::s3);
    throw std::invalid_argument("unknown built-in signal '" + std::string(name) + "'");
}

} // namespace lifsel
