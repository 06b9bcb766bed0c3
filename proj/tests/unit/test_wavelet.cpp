#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lifsel/design.hpp"
#include "lifsel/dwt.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/quadrature.hpp"
#include "lifsel/signal.hpp"
#include "lifsel/wavelet.hpp"
#include "oracle_values.hpp"

using namespace lifsel;

namespace {

Eigen::MatrixXd level_gram(const ModelChain& chain, std::size_t pos, int depth)
{
    const auto grid = midpoint_grid(depth);
    const std::size_t count = chain.index_count(pos);
    Eigen::MatrixXd values(count, grid.size());
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i)
            values(k, i) = chain.basis_eval(pos, static_cast<std::int64_t>(k), grid[i]);
    return values * values.transpose() / static_cast<double>(grid.size());
}

} // namespace

TEST(Filters, MatchIndependentFactorization)
{
    const auto h = daubechies20_filter();
    ASSERT_EQ(h.size(), 20u);
    EXPECT_NEAR(h[0], oracle::db10_h0, 1e-15);
    EXPECT_NEAR(h[19], oracle::db10_h19, 1e-17);
    EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), std::sqrt(2.0), 1e-14);
    // Double-shift orthogonality.
    for (std::size_t shift = 0; shift < 10; ++shift) {
        double acc = 0.0;
        for (std::size_t l = 0; l + 2 * shift < 20; ++l)
            acc += h[l] * h[l + 2 * shift];
        EXPECT_NEAR(acc, shift == 0 ? 1.0 : 0.0, 1e-14);
    }
}

TEST(Cascade, MatchesEigenvectorCascade)
{
    const auto table = daubechies20_cascade(14);
    EXPECT_NEAR((*table)(1.0), oracle::phi_at_1, 1e-9);
    EXPECT_NEAR((*table)(2.5), oracle::phi_at_2_5, 1e-9);
    EXPECT_NEAR((*table)(3.0), oracle::phi_at_3, 1e-9);
    EXPECT_NEAR((*table)(4.25), oracle::phi_at_4_25, 1e-9);
    EXPECT_NEAR((*table)(7.0 / 3.0), oracle::phi_at_7_3, 1e-9);
    EXPECT_EQ((*table)(-0.1), 0.0);
    EXPECT_EQ((*table)(19.5), 0.0);
    // Partition of unity on integer shifts.
    for (double x : {0.1, 0.37, 0.5}) {
        double sum = 0.0;
        for (int l = 0; l < 19; ++l)
            sum += (*table)(x + l);
        EXPECT_NEAR(sum, 1.0, 1e-7);
    }
}

TEST(Cascade, CsvExport)
{
    const CascadeTable table(haar_filter(), 2);
    std::ostringstream out;
    table.write_csv(out);
    EXPECT_EQ(out.str().substr(0, 9), "node,phi\n");
}

TEST(ScalingEval, HaarClosedForm)
{
    const auto haar = BasisFamily::haar();
    for (double x : {0.0, 0.1, 0.5, 0.99, 1.0})
        EXPECT_EQ(scaling_eval(haar, 0, 0, x), 1.0);
    EXPECT_DOUBLE_EQ(scaling_eval(haar, 3, 2, 0.3), std::pow(2.0, 1.5));
    EXPECT_EQ(scaling_eval(haar, 3, 1, 0.3), 0.0);
    // Right-closed cells: 1/4 belongs to (1/8, 1/4] at level 3.
    EXPECT_DOUBLE_EQ(scaling_eval(haar, 3, 1, 0.25), std::pow(2.0, 1.5));
    EXPECT_THROW(scaling_eval(haar, 3, 8, 0.3), std::out_of_range);
    EXPECT_THROW(scaling_eval(haar, 3, -1, 0.3), std::out_of_range);
    EXPECT_THROW(scaling_eval(haar, 3, 0, 1.5), std::domain_error);
}

TEST(ScalingEval, Daubechies20)
{
    const auto d14 = BasisFamily::daubechies20(14);
    const auto d12 = BasisFamily::daubechies20(12);
    EXPECT_NEAR(scaling_eval(d14, 4, 5, 0.4), scaling_eval(d12, 4, 5, 0.4), 1e-4);
    EXPECT_NEAR(scaling_eval(d14, 4, 5, 0.4), oracle::d20_phi_4_5_at_0_4, 1e-9);
    EXPECT_NEAR(scaling_eval(d14, 3, 1, 1.0 / 3.0), oracle::d20_phi_3_1_at_third, 1e-9);
    // x = 1 wraps periodically to x = 0.
    EXPECT_NEAR(scaling_eval(d14, 2, 1, 1.0), scaling_eval(d14, 2, 1, 0.0), 1e-12);
    EXPECT_THROW(BasisFamily::daubechies20(8).validate(), std::invalid_argument);
}

TEST(HaarCells, MultiDimensional)
{
    const std::array<double, 2> a{0.3, 0.7};
    EXPECT_EQ(multid_haar_cell(a, 2), (std::vector<std::int64_t>{1, 2}));
    const std::array<double, 3> zero{0.0, 0.0, 0.0};
    EXPECT_EQ(multid_haar_cell(zero, 5), (std::vector<std::int64_t>{0, 0, 0}));
    const std::array<double, 1> one{1.0};
    EXPECT_EQ(multid_haar_cell(one, 3), (std::vector<std::int64_t>{7}));
    EXPECT_EQ(haar_cell(0.25, 2), 0);
    EXPECT_EQ(haar_cell(0.2500001, 2), 1);
}

TEST(HaarMultiD, ProductEvaluation)
{
    const WaveletBasis basis(BasisFamily::haar_multid(2));
    EXPECT_EQ(basis.size(2), 16u);
    const std::array<double, 2> x{0.3, 0.7};
    // Flat index, first axis fastest: k = 1 + 4 * 2.
    EXPECT_DOUBLE_EQ(basis.scaling_eval(2, 9, x), 4.0);
    EXPECT_EQ(basis.scaling_eval(2, 8, x), 0.0);
}

TEST(ModelChain, StructureAndIndicator)
{
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    EXPECT_EQ(chain.size(), 8u);
    EXPECT_EQ(chain.label(0), 1);
    EXPECT_EQ(chain.position_of(8), 7u);
    EXPECT_EQ(chain.index_count(2), 8u);
    EXPECT_EQ(chain.index_set(0).size(), 2u);
    EXPECT_THROW(ModelChain(BasisFamily::haar(), {2, 1}), std::invalid_argument);
    EXPECT_THROW(chain.position_of(9), std::out_of_range);

    const auto ind = ModelChain::with_indicator(0.0, 1.0 / 8.0);
    ASSERT_EQ(ind.size(), 5u);
    EXPECT_EQ(ind.label(0), 0);
    EXPECT_EQ(ind.label(3), 3);
    EXPECT_TRUE(ind.is_extra(4));
    EXPECT_EQ(ind.label(4), 4);
    EXPECT_EQ(ind.index_count(4), 1u);
    EXPECT_DOUBLE_EQ(ind.basis_eval(4, 0, 0.1), std::sqrt(8.0));
    EXPECT_EQ(ind.basis_eval(4, 0, 0.2), 0.0);
    EXPECT_THROW(ModelChain::with_indicator(0.5, 0.5), std::invalid_argument);
}

TEST(Orthonormality, GramIsIdentity)
{
    const auto haar = ModelChain::dyadic(BasisFamily::haar(), 1, 5);
    const auto d20 = ModelChain::dyadic(BasisFamily::daubechies20(), 1, 5);
    for (std::size_t pos : {0u, 2u, 4u}) {
        const auto gh = level_gram(haar, pos, 16);
        EXPECT_LT((gh - Eigen::MatrixXd::Identity(gh.rows(), gh.cols())).cwiseAbs().maxCoeff(), 1e-12);
        const auto gd = level_gram(d20, pos, 16);
        EXPECT_LT((gd - Eigen::MatrixXd::Identity(gd.rows(), gd.cols())).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(EmpiricalCoefficients, HaarExamples)
{
    const std::size_t n = 256;
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    ObservationRecord rec{NoiseModel::regression(n, 0.2), std::vector<double>(n, 1.3), 0, 0};
    for (int m : {1, 4, 8}) {
        for (double c : empirical_coefficients(rec, chain, m))
            EXPECT_NEAR(c, 1.3 * std::pow(2.0, -m / 2.0), 1e-13);
    }
    std::mt19937_64 gen(5);
    std::normal_distribution<double> normal;
    for (auto& y : rec.data)
        y = normal(gen);
    const double first_half = std::accumulate(rec.data.begin(), rec.data.begin() + n / 2, 0.0) / (n / 2);
    EXPECT_NEAR(empirical_coefficients(rec, chain, 1)[0], first_half / std::sqrt(2.0), 1e-13);
    rec.data.resize(128);
    rec.model.n = 128;
    EXPECT_THROW(empirical_coefficients(rec, chain, 8), std::invalid_argument);
}

TEST(EmpiricalCoefficients, Daubechies20MatchesQuadrature)
{
    const std::size_t n = 256;
    const auto chain = ModelChain::dyadic(BasisFamily::daubechies20(), 1, 5);
    const auto rec = simulate_regression(builtin_signal("s1"), NoiseModel::regression(n, 0.0), 1, 0);
    const auto grid = midpoint_grid(16);
    for (int m = 1; m <= 5; ++m) {
        const auto pos = chain.position_of(m);
        const auto coeff = empirical_coefficients(rec, chain, m);
        ASSERT_EQ(coeff.size(), std::size_t{1} << m);
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            double exact = 0.0;
            for (double x : grid)
                exact += signals::s1(x) * chain.basis_eval(pos, static_cast<std::int64_t>(k), x);
            exact /= static_cast<double>(grid.size());
            EXPECT_NEAR(coeff[k], exact, 1e-3) << "m=" << m << " k=" << k;
        }
    }
}

TEST(ProjectionNorm, Examples)
{
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 0, 8);
    const auto ones = sample_midpoints([](double) { return 1.0; }, 16);
    const auto g1 = sample_midpoints([](double x) { return std::cos(64.0 * std::numbers::pi * x); }, 16);
    const auto step = sample_midpoints([](double x) { return x <= 0.25 ? 4.0 : 0.0; }, 16);
    for (int m = 0; m <= 8; ++m)
        EXPECT_NEAR(projection_norm_sq(ones, chain, m), 1.0, 1e-12);
    for (int m = 0; m <= 5; ++m)
        EXPECT_NEAR(projection_norm_sq(g1, chain, m), 0.0, 1e-10);
    EXPECT_NEAR(projection_norm_sq(step, chain, 2), 4.0, 1e-12);
}

TEST(ProjectionNorm, MonotoneAndBounded)
{
    const auto g = sample_midpoints([](double x) { return std::exp(-5 * x) * std::sin(23 * x); }, 16);
    double norm = 0.0;
    for (double v : g)
        norm += v * v;
    norm /= static_cast<double>(g.size());
    for (auto family : {BasisFamily::haar(), BasisFamily::daubechies20()}) {
        const auto chain = ModelChain::dyadic(family, 1, 8);
        double prev = 0.0;
        for (int m = 1; m <= 8; ++m) {
            const double p = projection_norm_sq(g, chain, m);
            EXPECT_GE(p, prev - 1e-9);
            EXPECT_LE(p, norm + 1e-6);
            prev = p;
        }
    }
}

TEST(Nesting, HaarProjectionIdempotence)
{
    const std::size_t n = 256;
    const auto model = NoiseModel::regression(n, 1.0);
    const auto chain = ModelChain::dyadic(BasisFamily::haar(), 1, 8);
    const CoefficientDesign design(chain, model);
    std::mt19937_64 gen(9);
    std::normal_distribution<double> normal;
    std::vector<double> y(n);
    for (auto& v : y)
        v = normal(gen);
    for (std::size_t m = 0; m < chain.size(); ++m) {
        const auto pm = design.grid_fit(design.coefficients(y, m), m);
        for (std::size_t j = m; j < chain.size(); ++j) {
            const auto pjm = design.grid_fit(design.coefficients(pm, j), j);
            for (std::size_t i = 0; i < n; ++i)
                EXPECT_NEAR(pjm[i], pm[i], 1e-8);
        }
    }
}

TEST(Dwt, HaarParseval)
{
    const std::size_t n = 256;
    std::mt19937_64 gen(3);
    std::normal_distribution<double> normal;
    std::vector<double> y(n), scaled(n);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = normal(gen);
        scaled[i] = y[i] / std::sqrt(double(n));
        energy += y[i] * y[i] / n;
    }
    const auto w = periodic_dwt(scaled, haar_filter(), 0);
    double sum = 0.0;
    for (double c : w.scaling)
        sum += c * c;
    for (const auto& level : w.details)
        for (double c : level)
            sum += c * c;
    EXPECT_NEAR(sum, energy, 1e-10);
    EXPECT_EQ(w.details.size(), 8u);
}

TEST(Dwt, PerfectReconstructionAndFilterConvention)
{
    const std::size_t n = 64;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::sin(0.3 * i) + 0.1 * i;
    for (auto kind : {BasisKind::Haar1D, BasisKind::Daubechies20}) {
        const auto h = basis_filter(kind);
        for (int coarse : {0, 1, 3}) {
            const auto w = periodic_dwt(x, h, coarse);
            const auto back = inverse_periodic_dwt(w, h);
            for (std::size_t i = 0; i < n; ++i)
                EXPECT_NEAR(back[i], x[i], 1e-10);
        }
    }
    // One analysis step: a_k = sum_l h_l x_{(2k+l) mod n}.
    const auto h = daubechies20_filter();
    const auto w = periodic_dwt(x, h, 5);
    for (std::size_t k = 0; k < 32; ++k) {
        double a = 0.0;
        for (std::size_t l = 0; l < h.size(); ++l)
            a += h[l] * x[(2 * k + l) % n];
        EXPECT_NEAR(w.scaling[k], a, 1e-12);
    }
    EXPECT_THROW(periodic_dwt(std::vector<double>(48, 0.0), h, 0), std::invalid_argument);
}
