#include "lifsel/dwt.hpp"

#include <stdexcept>
#include <string>

#include "lifsel/quadrature.hpp"

namespace lifsel {

namespace {

std::vector<double> high_pass(std::span<const double> h)
{
    const std::size_t taps = h.size();
    std::vector<double> g(taps);
    for (std::size_t l = 0; l < taps; ++l)
        g[l] = (l % 2 == 0 ? 1.0 : -1.0) * h[taps - 1 - l];
    return g;
}

} // namespace

WaveletCoefficients periodic_dwt(std::span<const double> x, std::span<const double> filter, int coarse_level)
{
    if (filter.size() < 2 || filter.size() % 2 != 0)
        throw std::invalid_argument("dwt: filter must have an even number of taps");
    const int top = dyadic_log2(x.size());
    if (coarse_level < 0 || coarse_level > top)
        throw std::invalid_argument("dwt: coarse level " + std::to_string(coarse_level) + " outside [0, " +
                                    std::to_string(top) + "]");
    const auto g = high_pass(filter);

    WaveletCoefficients out;
    out.coarse_level = coarse_level;
    out.details.resize(static_cast<std::size_t>(top - coarse_level));
    std::vector<double> current(x.begin(), x.end());
    for (int j = top - 1; j >= coarse_level; --j) {
        const std::size_t len = current.size();
        const std::size_t half = len / 2;
        std::vector<double> approx(half, 0.0);
        std::vector<double> detail(half, 0.0);
        for (std::size_t k = 0; k < half; ++k) {
            double a = 0.0;
            double d = 0.0;
            for (std::size_t l = 0; l < filter.size(); ++l) {
                const double v = current[(2 * k + l) % len];
                a += filter[l] * v;
                d += g[l] * v;
            }
            approx[k] = a;
            detail[k] = d;
        }
        out.details[static_cast<std::size_t>(j - coarse_level)] = std::move(detail);
        current = std::move(approx);
    }
    out.scaling = std::move(current);
    return out;
}

std::vector<double> inverse_periodic_dwt(const WaveletCoefficients& coeffs, std::span<const double> filter)
{
    if (filter.size() < 2 || filter.size() % 2 != 0)
        throw std::invalid_argument("dwt: filter must have an even number of taps");
    if (coeffs.scaling.size() != (std::size_t{1} << coeffs.coarse_level))
        throw std::invalid_argument("dwt: scaling block does not match the coarse level");
    const auto g = high_pass(filter);

    std::vector<double> current = coeffs.scaling;
    for (std::size_t i = 0; i < coeffs.details.size(); ++i) {
        const auto& detail = coeffs.details[i];
        const std::size_t half = current.size();
        if (detail.size() != half)
            throw std::invalid_argument("dwt: detail block " + std::to_string(i) + " has the wrong length");
        const std::size_t len = 2 * half;
        std::vector<double> next(len, 0.0);
        for (std::size_t k = 0; k < half; ++k) {
            for (std::size_t l = 0; l < filter.size(); ++l)
                next[(2 * k + l) % len] += filter[l] * current[k] + g[l] * detail[k];
        }
        current = std::move(next);
    }
    return current;
}

} // namespace lifsel
