#include "lifsel/quadrature.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace lifsel {

namespace {

void check_depth(int depth)
{
    if (depth < 0 || depth > 26)
        throw std::invalid_argument("quadrature depth must lie in [0, 26], got " + std::to_string(depth));
}

} // namespace

std::vector<double> midpoint_grid(int depth)
{
    check_depth(depth);
    const std::size_t count = std::size_t{1} << depth;
    const double h = 1.0 / static_cast<double>(count);
    std::vector<double> x(count);
    for (std::size_t i = 0; i < count; ++i)
        x[i] = (static_cast<double>(i) + 0.5) * h;
    return x;
}

std::vector<double> sample_midpoints(const std::function<double(double)>& f, int depth)
{
    auto x = midpoint_grid(depth);
    for (auto& v : x)
        v = f(v);
    return x;
}

double midpoint_integral(const std::function<double(double)>& f, double a, double b, int depth)
{
    check_depth(depth);
    const std::size_t count = std::size_t{1} << depth;
    const double h = (b - a) / static_cast<double>(count);
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        sum += f(a + (static_cast<double>(i) + 0.5) * h);
    return sum * h;
}

bool is_power_of_two(std::size_t n) noexcept
{
    return std::has_single_bit(n);
}

int dyadic_log2(std::size_t size)
{
    if (!is_power_of_two(size))
        throw std::invalid_argument("length " + std::to_string(size) + " is not a power of two");
    return std::countr_zero(size);
}

} // namespace lifsel
