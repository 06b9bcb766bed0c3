#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "lifsel/comparators.hpp"
#include "lifsel/design.hpp"
#include "lifsel/dwt.hpp"
#include "lifsel/functional_spec.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/signal.hpp"
#include "lifsel/wavelet.hpp"
#include "oracle_values.hpp"

using namespace lifsel;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v)
        x = normal(gen);
    return v;
}

double grid_l2(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

} // namespace

TEST(P2, ZeroDataPicksFirstLevel)
{
    const std::size_t n = 256;
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    const ObservationRecord rec{NoiseModel::regression(n, 0.2), std::vector<double>(n, 0.0), 0, 0};
    EXPECT_EQ(p2_select_level(rec, chain), 1);
}

TEST(P2, NoiselessPiecewiseConstantSelectsItsLevel)
{
    const std::size_t n = 256;
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    // Constant on level-3 cells with a genuine jump inside a level-2 cell.
    const auto sig = Signal::univariate("steps3", [](double x) {
        const auto k = haar_cell(x, 3);
        return static_cast<double>((k * 5) % 7) - 3.0;
    });
    const auto rec = simulate_regression(sig, NoiseModel::regression(n, 0.0), 1, 0);
    const CoefficientDesign design(chain, NoiseModel::regression(n, 0.2));
    const auto fit = p2_select(rec.data, chain, design);
    EXPECT_EQ(fit.level, 3);
    // Enumeration: every level below 3 has a strictly larger criterion.
    for (std::size_t pos = 0; pos < 2; ++pos)
        EXPECT_GT(fit.criterion[pos], fit.criterion[2]);
}

TEST(P2, CriterionDecomposesByParseval)
{
    const std::size_t n = 256;
    const double sigma = 0.2;
    const auto model = NoiseModel::regression(n, sigma);
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    const CoefficientDesign design(chain, model);
    const auto y = random_vector(n, 4);
    const auto fit = p2_select(y, chain, design);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
        scaled[i] = y[i] / std::sqrt(double(n));
    const auto w = periodic_dwt(scaled, haar_filter(), 1);
    // gamma_n(s_hat_8) = 0; dropping levels m..7 of details adds their energy.
    for (int m = 1; m <= 8; ++m) {
        double discarded = 0.0;
        for (int level = m; level < 8; ++level)
            for (double d : w.details[level - 1])
                discarded += d * d;
        const double gamma = fit.criterion[chain.position_of(m)] - 2.0 * std::ldexp(1.0, m) * sigma * sigma / n;
        EXPECT_NEAR(gamma, discarded, 1e-12);
    }
}

TEST(P2, SelectsHighLevelsForS2)
{
    const std::size_t n = 256;
    const auto model = NoiseModel::regression(n, 0.2);
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    const auto sim = Simulator::regression(builtin_signal("s2"), model);
    std::map<int, int> counts;
    for (int r = 0; r < 500; ++r)
        ++counts[p2_select_level(sim.draw(12, r), chain)];
    const auto modal = std::max_element(counts.begin(), counts.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    EXPECT_GE(modal->first, 5);
    EXPECT_LE(modal->first, 6);
}

TEST(P3, ThresholdExamples)
{
    const std::size_t n = 256;
    const auto model = NoiseModel::regression(n, 0.2);
    EXPECT_NEAR(universal_threshold(model), 0.2 * std::sqrt(2.0 * std::log(256.0)), 1e-15);
    EXPECT_NEAR(universal_threshold(model), 0.666, 1e-3);
    for (auto family : {BasisFamily::haar(), BasisFamily::daubechies20()}) {
        const auto zero = p3_threshold_estimate(std::vector<double>(n, 0.0), model, family, 0);
        for (double v : zero)
            EXPECT_EQ(v, 0.0);
        // A single detail coefficient of 10 sigma survives intact.
        const auto h = basis_filter(family.kind);
        auto coeffs = periodic_dwt(std::vector<double>(n, 0.0), h, 0);
        coeffs.details[4][7] = 10.0 * 0.2;
        const auto y = inverse_periodic_dwt(coeffs, h);
        const auto rec = p3_threshold_estimate(y, model, family, 0);
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(rec[i], y[i], 1e-12);
    }
    EXPECT_THROW(p3_threshold_estimate(std::vector<double>(200, 0.0), NoiseModel::regression(200, 0.2),
                                       BasisFamily::haar(), 0),
                 std::invalid_argument);
}

TEST(P3, ZeroThresholdIsIdentityAndShrinkingIsMonotone)
{
    const std::size_t n = 128;
    const auto model = NoiseModel::regression(n, 0.2);
    const auto y = random_vector(n, 8, 0.5);
    for (auto family : {BasisFamily::haar(), BasisFamily::daubechies20()}) {
        for (int keep : {0, 1, 2}) {
            const auto same = p3_threshold_estimate(y, model, family, keep, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                EXPECT_NEAR(same[i], y[i], 1e-10);
        }
        double prev = std::numeric_limits<double>::infinity();
        for (double t : {2.0, 1.0, 0.6, 0.3, 0.1, 0.0}) {
            const double err = grid_l2(p3_threshold_estimate(y, model, family, 1, t), y);
            EXPECT_LE(err, prev + 1e-12);
            prev = err;
        }
    }
}

TEST(P4, Examples)
{
    const std::size_t n = 256;
    const std::vector<double> zeros(n, 0.0), ones(n, 1.0), y = random_vector(n, 2);
    EXPECT_EQ(p4_empirical(y, zeros), 0.0);
    EXPECT_NEAR(p4_empirical(std::vector<double>(n, 2.5), ones), 2.5, 1e-14);
    EXPECT_THROW(p4_empirical(y, std::vector<double>(n - 1, 1.0)), std::invalid_argument);
}

TEST(P4, ClosedFormRiskAndVariance)
{
    const std::size_t n = 256;
    const auto model = NoiseModel::regression(n, 0.2);
    const auto spec = FunctionalSpec::interval(0.0, 1.0 / 128.0);
    const auto g = weight_grid(spec, n);
    // Grid points 1/256 and 2/256 lie in [0, 1/128].
    EXPECT_DOUBLE_EQ(g[0], 128.0);
    EXPECT_DOUBLE_EQ(g[1], 128.0);
    EXPECT_DOUBLE_EQ(g[2], 0.0);
    const auto sim = Simulator::regression(Signal::univariate("zero", [](double) { return 0.0; }), model);
    const int reps = 100000;
    double abs_sum = 0.0, abs_sq = 0.0, sq = 0.0, quad = 0.0;
    std::vector<double> data;
    for (int r = 0; r < reps; ++r) {
        sim.draw_into(31, r, data);
        const double e = p4_empirical(data, g);
        abs_sum += std::abs(e);
        abs_sq += e * e;
        sq += e * e;
        quad += e * e * e * e;
    }
    const double mean_abs = abs_sum / reps;
    const double sd_abs = std::sqrt(abs_sq / reps - mean_abs * mean_abs);
    EXPECT_LT(std::abs(mean_abs - oracle::p4_abs_error_h128), 3.0 * sd_abs / std::sqrt(reps));
    double sum_g2 = 0.0;
    for (double v : g)
        sum_g2 += v * v;
    const double var = model.unit_variance() * sum_g2 / n;
    const double var_hat = sq / reps;
    const double var_se = std::sqrt((quad / reps - var_hat * var_hat) / reps);
    EXPECT_LT(std::abs(var_hat - var), 4.0 * var_se);
}

TEST(GridFunctional, PointAndIntegralPlugIn)
{
    const std::size_t n = 8;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = static_cast<double>(i + 1);
    // Haar: value of the cell ((i-1)/n, i/n] containing x0.
    EXPECT_DOUBLE_EQ(GridFunctional(FunctionalSpec::point(0.25), BasisFamily::haar(), n)(v), 2.0);
    EXPECT_DOUBLE_EQ(GridFunctional(FunctionalSpec::point(0.26), BasisFamily::haar(), n)(v), 3.0);
    // Smooth bases: linear interpolation between grid values i/n.
    EXPECT_NEAR(GridFunctional(FunctionalSpec::point(0.3125), BasisFamily::daubechies20(), n)(v), 2.5, 1e-14);
    // Periodic wrap between x = 1 (value 8) and x = 1/8 (value 1).
    EXPECT_NEAR(GridFunctional(FunctionalSpec::point(1.0 / 16.0), BasisFamily::daubechies20(), n)(v), 4.5, 1e-14);
    // Integral of a step function against g = 1 on [0, 1/4].
    EXPECT_NEAR(GridFunctional(FunctionalSpec::interval(0.0, 0.25), BasisFamily::haar(), n)(v), 1.5, 1e-14);
}

TEST(ComparatorSpec, Validation)
{
    EXPECT_EQ(default_keep_coarse_level(BasisKind::Haar1D), 1);
    EXPECT_EQ(default_keep_coarse_level(BasisKind::Daubechies20), 2);
    ComparatorSpec spec{ComparatorKind::P3Threshold, BasisFamily::haar(), 9};
    EXPECT_THROW(spec.validate(256), std::invalid_argument);
    spec.keep_coarse_level = 8;
    EXPECT_NO_THROW(spec.validate(256));
    spec.keep_coarse_level = -1;
    EXPECT_THROW(spec.validate(256), std::invalid_argument);
}
