#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lifsel {

inline constexpr int kDefaultQuadratureDepth = 16;

//! Midpoints (i + 1/2) / 2^depth, i = 0 .. 2^depth - 1.
std::vector<double> midpoint_grid(int depth);

//! f sampled on midpoint_grid(depth).
std::vector<double> sample_midpoints(const std::function<double(double)>& f, int depth);

//! Composite midpoint rule with 2^depth panels on [a, b].
double midpoint_integral(const std::function<double(double)>& f, double a, double b, int depth);

//! log2 of a power-of-two length; throws otherwise.
int dyadic_log2(std::size_t size);

bool is_power_of_two(std::size_t n) noexcept;

} // namespace lifsel
