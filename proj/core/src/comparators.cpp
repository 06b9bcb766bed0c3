#include "lifsel/comparators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lifsel/dwt.hpp"
#include "lifsel/quadrature.hpp"

namespace lifsel {

void ComparatorSpec::validate(std::size_t n) const
{
    basis.validate();
    if (kind == ComparatorKind::P3Threshold) {
        const int top = dyadic_log2(n);
        if (keep_coarse_level < 0 || keep_coarse_level > top)
            throw std::invalid_argument("keep_coarse_level must lie in [0, " + std::to_string(top) + "]");
    }
}

int default_keep_coarse_level(BasisKind kind)
{
    return kind == BasisKind::Daubechies20 ? 2 : 1;
}

MallowsFit p2_select(std::span<const double> data, const ModelChain& chain, const CoefficientDesign& design)
{
    const auto& model = design.model();
    if (model.kind != NoiseKind::FiniteRegression)
        throw std::invalid_argument("P2 is defined for finite regression");
    if (data.size() != model.n)
        throw std::invalid_argument("P2: data length does not match n");
    const double n = static_cast<double>(model.n);
    MallowsFit fit;
    double best = 0.0;
    bool have = false;
    std::vector<double> coeffs;
    for (std::size_t pos = 0; pos < chain.size(); ++pos) {
        if (chain.is_extra(pos))
            continue;
        coeffs.resize(design.index_count(pos));
        design.coefficients(data, pos, coeffs);
        const auto fitted = design.grid_fit(coeffs, pos);
        double rss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i)
            rss += (data[i] - fitted[i]) * (data[i] - fitted[i]);
        const double crit = rss / n + 2.0 * static_cast<double>(coeffs.size()) * model.sigma * model.sigma / n;
        fit.criterion.push_back(crit);
        if (!have || crit < best) {
            best = crit;
            fit.position = pos;
            have = true;
        }
    }
    if (!have)
        throw std::invalid_argument("P2: chain has no multiresolution level");
    fit.level = chain.label(fit.position);
    return fit;
}

int p2_select_level(const ObservationRecord& record, const ModelChain& chain)
{
    CoefficientDesign design(chain, record.model);
    return p2_select(record.data, chain, design).level;
}

double universal_threshold(const NoiseModel& model)
{
    return model.sigma * std::sqrt(2.0 * std::log(static_cast<double>(model.n)));
}

std::vector<double> p3_threshold_estimate(std::span<const double> data, const NoiseModel& model,
                                          const BasisFamily& basis, int keep_coarse_level,
                                          std::optional<double> threshold)
{
    if (model.kind != NoiseKind::FiniteRegression)
        throw std::invalid_argument("P3 is defined for finite regression");
    if (!is_power_of_two(data.size()))
        throw std::invalid_argument("P3 needs a dyadic number of observations, got " + std::to_string(data.size()));
    ComparatorSpec{ComparatorKind::P3Threshold, basis, keep_coarse_level}.validate(data.size());
    const double thr = threshold.value_or(universal_threshold(model));
    if (!(thr >= 0.0))
        throw std::invalid_argument("P3 threshold must be nonnegative");
    const auto filter = basis_filter(basis.kind);
    auto coeffs = periodic_dwt(data, filter, keep_coarse_level);
    for (auto& level : coeffs.details) {
        for (auto& d : level) {
            if (std::abs(d) < thr)
                d = 0.0;
        }
    }
    return inverse_periodic_dwt(coeffs, filter);
}

std::vector<double> p3_threshold_estimate(const ObservationRecord& record, const BasisFamily& basis,
                                          int keep_coarse_level, std::optional<double> threshold)
{
    return p3_threshold_estimate(record.data, record.model, basis, keep_coarse_level, threshold);
}

double p4_empirical(std::span<const double> data, std::span<const double> g_grid)
{
    if (data.size() != g_grid.size())
        throw std::invalid_argument("P4: weight grid has " + std::to_string(g_grid.size()) + " entries, data has " +
                                    std::to_string(data.size()));
    if (data.empty())
        throw std::invalid_argument("P4: empty record");
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        sum += data[i] * g_grid[i];
    return sum / static_cast<double>(data.size());
}

double p4_empirical(const ObservationRecord& record, std::span<const double> g_grid)
{
    return p4_empirical(record.data, g_grid);
}

std::vector<double> weight_grid(const FunctionalSpec& functional, std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = functional.weight(static_cast<double>(i + 1) / static_cast<double>(n));
    return g;
}

GridFunctional::GridFunctional(const FunctionalSpec& functional, const BasisFamily& basis, std::size_t n) : n_(n)
{
    if (n == 0)
        throw std::invalid_argument("grid functional: n must be positive");
    if (const auto* p = std::get_if<PointEval>(&functional.kind())) {
        if (p->x0.size() != 1 || p->r != 0)
            throw std::invalid_argument("grid functional: univariate point values only");
        const double x = p->x0[0];
        const double t = x * static_cast<double>(n);
        if (basis.is_haar()) {
            // Sample i (1-based) represents the cell ((i-1)/n, i/n].
            auto i = static_cast<std::size_t>(std::max(std::ceil(t), 1.0));
            weights_.emplace_back(std::min(i, n) - 1, 1.0);
        } else {
            // Samples sit at i/n; index n-1 is x = 1 = 0 periodically.
            const double base = std::floor(t);
            const double frac = t - base;
            const auto lo = static_cast<std::size_t>(base) % n;
            const std::size_t hi = (lo + 1) % n;
            weights_.emplace_back((lo + n - 1) % n, 1.0 - frac);
            if (frac > 0.0)
                weights_.emplace_back((hi + n - 1) % n, frac);
        }
        return;
    }
    const auto cells = cell_integrals(functional, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cells[i] != 0.0)
            weights_.emplace_back(i, cells[i]);
    }
}

double GridFunctional::operator()(std::span<const double> grid_values) const
{
    if (grid_values.size() != n_)
        throw std::invalid_argument("grid functional: wrong number of grid values");
    double sum = 0.0;
    for (auto [i, w] : weights_)
        sum += w * grid_values[i];
    return sum;
}

} // namespace lifsel
