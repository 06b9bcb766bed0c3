#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace lifsel {

//! A regression function on [0,1]^d.
class Signal {
public:
    using Function = std::function<double(std::span<const double>)>;

    Signal(std::string id, std::size_t dimension, Function eval, int truth_quadrature_depth = 16);

    static Signal univariate(std::string id, std::function<double(double)> eval,
                             int truth_quadrature_depth = 16);

    const std::string& id() const noexcept { return id_; }
    std::size_t dimension() const noexcept { return dimension_; }
    int truth_quadrature_depth() const noexcept { return depth_; }

    double operator()(double x) const;
    double operator()(std::span<const double> x) const;

private:
    std::string id_;
    std::size_t dimension_;
    Function eval_;
    int depth_;
};

namespace signals {
double s1(double x);
double s2(double x);
double s3(double x);
} // namespace signals

bool is_builtin_signal(std::string_view name);
//! "s1", "s2" or "s3".
Signal builtin_signal(std::string_view name);

} // namespace lifsel
