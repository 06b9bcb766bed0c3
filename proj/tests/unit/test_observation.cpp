#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lifsel/functional_spec.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/quadrature.hpp"
#include "lifsel/rng.hpp"
#include "lifsel/signal.hpp"
#include "lifsel/wavelet.hpp"
#include "oracle_values.hpp"

using namespace lifsel;

namespace {

Signal constant_signal(double c)
{
    return Signal::univariate("const", [c](double) { return c; });
}

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

TEST(Signals, BuiltinFormulas)
{
    EXPECT_DOUBLE_EQ(signals::s1(0.5), (std::pow(0.5, 4) - 0.5) * std::sin(3.0));
    EXPECT_DOUBLE_EQ(signals::s2(0.5), 2.0 * std::exp(-7.5));
    EXPECT_DOUBLE_EQ(signals::s3(0.5), 0.5 * std::cos(std::numbers::pi));
    EXPECT_DOUBLE_EQ(signals::s3(0.8), 0.64 * std::cos(12.0 * std::numbers::pi));
    EXPECT_DOUBLE_EQ(signals::s3(0.0), 0.0);
    EXPECT_TRUE(is_builtin_signal("s2"));
    EXPECT_FALSE(is_builtin_signal("s4"));
    EXPECT_THROW(builtin_signal("s4"), std::invalid_argument);
}

TEST(Rng, StreamsAreReproducibleAndDistinct)
{
    NoiseStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    const double x = a.standard_normal();
    EXPECT_EQ(x, b.standard_normal());
    EXPECT_NE(x, c.standard_normal());
    EXPECT_NE(x, d.standard_normal());
    EXPECT_NE(replicate_stream_key(1, 0), replicate_stream_key(0, 1));
}

TEST(Observation, NoiselessRegressionIsTheGrid)
{
    const auto model = NoiseModel::regression(4, 0.0);
    const auto rec = simulate_regression(builtin_signal("s1"), model, 1, 0);
    ASSERT_EQ(rec.data.size(), 4u);
    for (int i = 1; i <= 4; ++i)
        EXPECT_EQ(rec.data[i - 1], signals::s1(i / 4.0));
}

TEST(Observation, ZeroSignalVarianceMatchesSigma)
{
    const auto model = NoiseModel::regression(256, 0.2);
    const auto sim = Simulator::regression(constant_signal(0.0), model);
    const double band = 3.0 * std::sqrt(2.0 / 255.0) * 0.04;
    int inside = 0;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        const auto rec = sim.draw(11, rep);
        const double m = mean_of(rec.data);
        double ss = 0.0;
        for (double y : rec.data)
            ss += (y - m) * (y - m);
        inside += std::abs(ss / 255.0 - 0.04) <= band ? 1 : 0;
    }
    EXPECT_GE(inside, 48);
}

TEST(Observation, ResidualStdOfS2IsSigma)
{
    const auto model = NoiseModel::regression(256, 0.2);
    const auto rec = simulate_regression(builtin_signal("s2"), model, 2008, 0);
    double ss = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
        const double r = rec.data[i] - signals::s2((i + 1) / 256.0);
        ss += r * r;
    }
    EXPECT_NEAR(std::sqrt(ss / 256.0), 0.2, 0.03);
}

TEST(Observation, DeterminismAndReplicateIndependence)
{
    const auto model = NoiseModel::regression(256, 0.2);
    const auto sim = Simulator::regression(builtin_signal("s3"), model);
    EXPECT_EQ(sim.draw(5, 9).data, sim.draw(5, 9).data);
    std::vector<double> out;
    sim.draw_into(5, 9, out);
    EXPECT_EQ(out, sim.draw(5, 9).data);

    // First noise value of consecutive replicates: empirical correlation.
    const auto zero = Simulator::regression(constant_signal(0.0), NoiseModel::regression(2, 1.0));
    const int pairs = 10000;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int r = 0; r < pairs; ++r) {
        const double a = zero.draw(77, 2 * r).data[0];
        const double b = zero.draw(77, 2 * r + 1).data[0];
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy)), 3.0 / std::sqrt(pairs));
}

TEST(Observation, ObserveCoefficientExamples)
{
    const auto model = NoiseModel::regression(64, 0.0);
    const auto rec = simulate_regression(constant_signal(1.7), model, 1, 0);
    const std::vector<double> zeros(64, 0.0), ones(64, 1.0);
    EXPECT_EQ(observe_coefficient(rec, zeros), 0.0);
    EXPECT_NEAR(observe_coefficient(rec, ones), 1.7, 1e-14);
    EXPECT_THROW(observe_coefficient(rec, std::vector<double>(63, 1.0)), std::invalid_argument);
}

TEST(Observation, HaarCoefficientIsUnbiased)
{
    const std::size_t n = 256;
    const auto model = NoiseModel::regression(n, 0.2);
    const auto signal = builtin_signal("s3");
    std::vector<double> t(n), clean(n);
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 1.0) / n;
        t[i] = scaling_eval(BasisFamily::haar(), 3, 2, x);
        expected += t[i] * signals::s3(x) / n;
    }
    const auto sim = Simulator::regression(signal, model);
    const int reps = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double y = observe_coefficient(sim.draw(3, r), t);
        sum += y;
        sum2 += y * y;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum2 / reps - mean * mean);
    EXPECT_LT(std::abs(mean - expected), 3.0 * sd / std::sqrt(reps));
    // Var Y(t) = (sigma^2/n) (1/n) sum t^2 with (1/n) sum t^2 = 1 here.
    EXPECT_NEAR(sd * sd, 0.04 / n, 0.04 / n * 0.05);
}

TEST(Observation, GaussianSequenceAddsScaledNoise)
{
    const std::vector<double> beta{0.5, -1.0, 2.0, 0.0};
    const auto model = NoiseModel::sequence(100, 0.3);
    const auto sim = Simulator::sequence(beta, model);
    const auto rec = sim.draw(8, 2);
    NoiseStream stream(8, 2);
    for (std::size_t l = 0; l < beta.size(); ++l) {
        const double eps = stream.standard_normal();
        EXPECT_NEAR(rec.data[l], beta[l] + 0.3 * eps / 10.0, 1e-15);
        std::vector<double> unit(beta.size(), 0.0);
        unit[l] = 1.0;
        EXPECT_DOUBLE_EQ(observe_coefficient(rec, unit), rec.data[l]);
    }
}

TEST(Observation, WhiteNoiseCellCoefficients)
{
    // Cell coefficient <s, e_c> with e_c = 2^{D/2} 1_c: for s = x it is
    // 2^{-D/2} times the cell midpoint.
    const auto model = NoiseModel::white_noise(1024, 0.0, 4);
    const auto coeff = white_noise_cell_coefficients(Signal::univariate("id", [](double x) { return x; }), model);
    ASSERT_EQ(coeff.size(), 16u);
    for (std::size_t c = 0; c < 16; ++c)
        EXPECT_NEAR(coeff[c], 0.25 * (c + 0.5) / 16.0, 1e-9);
    const auto sim = Simulator::white_noise(builtin_signal("s2"), NoiseModel::white_noise(1024, 0.2, 4));
    EXPECT_EQ(sim.draw(1, 1).data.size(), 16u);
}

TEST(Observation, InvalidModelsAreRejected)
{
    EXPECT_THROW(NoiseModel::regression(0, 0.2).validate(), std::invalid_argument);
    EXPECT_THROW(NoiseModel::regression(16, -0.1).validate(), std::invalid_argument);
    EXPECT_THROW(NoiseModel::regression(16, std::nan("")).validate(), std::invalid_argument);
    EXPECT_NO_THROW(NoiseModel::regression(16, 0.0).validate());
    EXPECT_THROW(simulate_regression(builtin_signal("s1"), NoiseModel::sequence(16, 0.2), 1, 0),
                 std::invalid_argument);
}

TEST(Truth, PointAndIntegralValues)
{
    EXPECT_DOUBLE_EQ(truth_functional(builtin_signal("s2"), FunctionalSpec::point(0.5)), 2.0 * std::exp(-7.5));
    EXPECT_NEAR(truth_functional(constant_signal(1.0), FunctionalSpec::named("g2")), 0.0, 1e-12);
    const auto s1 = builtin_signal("s1");
    const auto quarter = FunctionalSpec::interval(0.0, 0.25);
    EXPECT_NEAR(truth_functional(s1, quarter), oracle::s1_mean_quarter, 1e-10);
    const auto coarse = Signal::univariate("s1", signals::s1, 14);
    EXPECT_NEAR(truth_functional(coarse, quarter), truth_functional(s1, quarter), 1e-8);
}

TEST(Truth, MatchesIndependentQuadrature)
{
    struct Case {
        const char* signal;
        FunctionalSpec functional;
        double value;
    };
    const Case cases[] = {
        {"s1", FunctionalSpec::interval(0, 1.0 / 32), oracle::s1_mean_1_32},
        {"s1", FunctionalSpec::interval(0, 1.0 / 128), oracle::s1_mean_1_128},
        {"s1", FunctionalSpec::named("g1"), oracle::s1_g1},
        {"s1", FunctionalSpec::named("g2"), oracle::s1_g2},
        {"s2", FunctionalSpec::interval(0, 0.25), oracle::s2_mean_quarter},
        {"s2", FunctionalSpec::interval(0, 1.0 / 32), oracle::s2_mean_1_32},
        {"s2", FunctionalSpec::interval(0, 1.0 / 128), oracle::s2_mean_1_128},
        {"s2", FunctionalSpec::named("g1"), oracle::s2_g1},
        {"s2", FunctionalSpec::named("g2"), oracle::s2_g2},
        {"s3", FunctionalSpec::interval(0, 0.25), oracle::s3_mean_quarter},
        {"s3", FunctionalSpec::interval(0, 1.0 / 32), oracle::s3_mean_1_32},
        {"s3", FunctionalSpec::interval(0, 1.0 / 128), oracle::s3_mean_1_128},
        {"s3", FunctionalSpec::named("g1"), oracle::s3_g1},
        {"s3", FunctionalSpec::named("g2"), oracle::s3_g2},
    };
    for (const auto& c : cases) {
        const double got = truth_functional(builtin_signal(c.signal), c.functional);
        EXPECT_NEAR(got, c.value, 1e-8 * std::max(1.0, std::abs(c.value)) + 1e-10)
            << c.signal << " " << c.functional.kind_name() << " " << c.functional.argument();
    }
}

TEST(Quadrature, MidpointRuleAndDyadicHelpers)
{
    EXPECT_NEAR(midpoint_integral([](double x) { return x * x; }, 0.0, 1.0, 12), 1.0 / 3.0, 1e-7);
    EXPECT_EQ(midpoint_grid(2), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
    EXPECT_EQ(dyadic_log2(256), 8);
    EXPECT_THROW(dyadic_log2(255), std::invalid_argument);
    EXPECT_TRUE(is_power_of_two(1));
    EXPECT_FALSE(is_power_of_two(0));
}
