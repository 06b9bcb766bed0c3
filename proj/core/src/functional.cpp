#include "lifsel/functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lifsel/quadrature.hpp"

namespace lifsel {

namespace {

double sum_sq(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return s;
}

std::vector<double> point_values(const PointEval& p, const ModelChain& chain, std::size_t pos)
{
    const std::size_t count = chain.index_count(pos);
    std::vector<double> v(count, 0.0);
    if (chain.family().is_haar() && !chain.is_extra(pos)) {
        // Only the cell containing x0 is nonzero.
        const int m = chain.label(pos);
        std::int64_t flat = 0;
        const auto cell = multid_haar_cell(p.x0, m);
        for (std::size_t a = 0; a < cell.size(); ++a)
            flat |= cell[a] << (static_cast<std::int64_t>(m) * static_cast<std::int64_t>(a));
        v[static_cast<std::size_t>(flat)] = chain.basis_eval(pos, flat, p.x0);
        return v;
    }
    for (std::size_t k = 0; k < count; ++k)
        v[k] = chain.basis_eval(pos, static_cast<std::int64_t>(k), p.x0);
    return v;
}

std::vector<double> interval_values(const IntervalMean& iv, const ModelChain& chain, std::size_t pos,
                                    std::span<const double> g_grid)
{
    const double h = iv.length();
    if (chain.is_extra(pos)) {
        const auto& ind = *chain.extra_model();
        return {ind.overlap(iv.a, iv.b) / (h * std::sqrt(ind.length()))};
    }
    if (chain.family().kind == BasisKind::Haar1D) {
        const int m = chain.label(pos);
        const std::size_t count = chain.index_count(pos);
        const double width = std::ldexp(1.0, -m);
        const double height = std::sqrt(std::ldexp(1.0, m));
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k) {
            const double lo = static_cast<double>(k) * width;
            v[k] = height * std::max(0.0, std::min(lo + width, iv.b) - std::max(lo, iv.a)) / h;
        }
        return v;
    }
    return midpoint_inner_products(g_grid, chain, pos);
}

//! Representer sum_k T(phi_k) phi_k on the midpoint grid.
std::vector<double> representer(const ModelChain& chain, std::size_t pos, std::span<const double> values, int depth)
{
    const auto x = midpoint_grid(depth);
    std::vector<double> r(x.size(), 0.0);
    if (chain.is_extra(pos)) {
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] = values[0] * chain.extra_model()->eval(x[i]);
        return r;
    }
    const int m = chain.label(pos);
    if (chain.family().kind == BasisKind::Haar1D) {
        const double height = std::sqrt(std::ldexp(1.0, m));
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] = values[static_cast<std::size_t>(haar_cell(x[i], m))] * height;
        return r;
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] == 0.0)
            continue;
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] += values[k] * chain.basis().scaling_eval(m, static_cast<std::int64_t>(k), x[i]);
    }
    return r;
}

} // namespace

std::string_view to_string(VarianceScale scale)
{
    return scale == VarianceScale::Paper42 ? "paper-4.2" : "definition-1";
}

VarianceScale parse_variance_scale(std::string_view text)
{
    if (text == "definition-1")
        return VarianceScale::DefinitionOne;
    if (text == "paper-4.2")
        return VarianceScale::Paper42;
    throw std::invalid_argument("sigma_scale must be 'definition-1' or 'paper-4.2', got '" + std::string(text) + "'");
}

FunctionalRep build_functional_rep(const FunctionalSpec& spec, const ModelChain& chain, const NoiseModel& model,
                                   VarianceScale scale)
{
    model.validate();
    const auto& kind = spec.kind();
    const std::size_t models = chain.size();
    FunctionalRep rep;
    rep.values.resize(models);
    rep.noise_unit = model.unit_variance();
    if (scale == VarianceScale::Paper42 && spec.is_integral())
        rep.noise_unit = 1.0;

    if (const auto* p = std::get_if<PointEval>(&kind)) {
        if (p->r != 0)
            throw std::invalid_argument("derivative order " + std::to_string(p->r) + " is not built in for " +
                                        chain.family().name() + "; supply T(phi) values as a custom functional");
        if (p->x0.size() != chain.basis().dimension())
            throw std::invalid_argument("point dimension does not match the basis");
        for (std::size_t pos = 0; pos < models; ++pos)
            rep.values[pos] = point_values(*p, chain, pos);
    } else if (const auto* c = std::get_if<CustomFunctional>(&kind)) {
        if (c->values.size() != models)
            throw std::invalid_argument("custom functional has " + std::to_string(c->values.size()) +
                                        " models, chain has " + std::to_string(models));
        for (std::size_t pos = 0; pos < models; ++pos) {
            if (c->values[pos].size() != chain.index_count(pos))
                throw std::invalid_argument("custom functional: model " + std::to_string(pos) +
                                            " has the wrong number of values");
            rep.values[pos] = c->values[pos];
        }
    } else {
        if (chain.basis().dimension() != 1)
            throw std::invalid_argument("integral functionals need a one-dimensional basis");
        std::vector<double> g_grid;
        const bool haar_interval = std::holds_alternative<IntervalMean>(kind) && chain.family().kind == BasisKind::Haar1D;
        if (!haar_interval)
            g_grid = sample_midpoints([&](double x) { return spec.weight(x); }, kDefaultQuadratureDepth);
        for (std::size_t pos = 0; pos < models; ++pos) {
            if (const auto* iv = std::get_if<IntervalMean>(&kind))
                rep.values[pos] = interval_values(*iv, chain, pos, g_grid);
            else
                rep.values[pos] = midpoint_inner_products(g_grid, chain, pos);
        }
    }

    rep.sigma_sq.resize(models);
    for (std::size_t pos = 0; pos < models; ++pos)
        rep.sigma_sq[pos] = rep.noise_unit * sum_sq(rep.values[pos]);

    const auto n = static_cast<Eigen::Index>(models);
    rep.sigma_diff_sq = Eigen::MatrixXd::Zero(n, n);
    rep.gram_mode = chain.extra_model() ? GramMode::GeneralGram : GramMode::Nested;

    std::vector<std::vector<double>> rep_grid;
    if (rep.gram_mode == GramMode::GeneralGram) {
        if (chain.basis().dimension() != 1)
            throw std::invalid_argument("non-nested chains are supported in one dimension only");
        for (std::size_t pos = 0; pos < models; ++pos)
            rep_grid.push_back(representer(chain, pos, rep.values[pos], kDefaultQuadratureDepth));
    }

    for (std::size_t j = 0; j < models; ++j) {
        for (std::size_t m = 0; m < j; ++m) {
            double v = 0.0;
            if (rep.gram_mode == GramMode::Nested || (!chain.is_extra(j) && !chain.is_extra(m))) {
                v = std::max(0.0, rep.sigma_sq[j] - rep.sigma_sq[m]);
            } else {
                // ||R_j - R_m||^2 equals v'Gv over the union basis.
                const auto& a = rep_grid[j];
                const auto& b = rep_grid[m];
                double s = 0.0;
                for (std::size_t i = 0; i < a.size(); ++i)
                    s += (a[i] - b[i]) * (a[i] - b[i]);
                v = rep.noise_unit * s / static_cast<double>(a.size());
            }
            rep.sigma_diff_sq(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = v;
            rep.sigma_diff_sq(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return rep;
}

double sigma_diff_general(std::span<const double> values_m, std::span<const double> values_j,
                          const Eigen::MatrixXd& gram, double noise_unit)
{
    const auto size = static_cast<Eigen::Index>(values_m.size() + values_j.size());
    if (gram.rows() != size || gram.cols() != size)
        throw std::invalid_argument("gram matrix does not match the union basis");
    Eigen::VectorXd v(size);
    for (std::size_t i = 0; i < values_m.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = values_m[i];
    for (std::size_t i = 0; i < values_j.size(); ++i)
        v(static_cast<Eigen::Index>(values_m.size() + i)) = -values_j[i];
    const double q = v.dot(gram * v);
    if (q < -1e-10 * std::max(1.0, v.squaredNorm()))
        throw std::logic_error("gram matrix is not positive semidefinite");
    return noise_unit * std::max(0.0, q);
}

Eigen::MatrixXd union_gram(const ModelChain& chain, std::size_t pos_m, std::size_t pos_j, int depth)
{
    if (chain.basis().dimension() != 1)
        throw std::invalid_argument("union_gram: one-dimensional chains only");
    const auto x = midpoint_grid(depth);
    const std::size_t cm = chain.index_count(pos_m);
    const std::size_t cj = chain.index_count(pos_j);
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(cm + cj), static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < cm + cj; ++k) {
        const std::size_t pos = k < cm ? pos_m : pos_j;
        const auto kk = static_cast<std::int64_t>(k < cm ? k : k - cm);
        for (std::size_t i = 0; i < x.size(); ++i)
            samples(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = chain.basis_eval(pos, kk, x[i]);
    }
    return samples * samples.transpose() / static_cast<double>(x.size());
}

ProjectionVariances integral_sigma_from_projections(std::span<const double> g_grid, const ModelChain& chain,
                                                    const NoiseModel& model, VarianceScale scale)
{
    if (chain.extra_model())
        throw std::invalid_argument("projection variances need a nested chain");
    model.validate();
    const double unit = scale == VarianceScale::Paper42 ? 1.0 : model.unit_variance();
    const std::size_t models = chain.size();
    std::vector<double> norms(models);
    for (std::size_t pos = 0; pos < models; ++pos)
        norms[pos] = sum_sq(midpoint_inner_products(g_grid, chain, pos));

    ProjectionVariances out;
    out.sigma_sq.resize(models);
    const auto n = static_cast<Eigen::Index>(models);
    out.sigma_diff_sq = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < models; ++j) {
        out.sigma_sq[j] = unit * norms[j];
        for (std::size_t m = 0; m < j; ++m) {
            const double v = unit * std::max(0.0, norms[j] - norms[m]);
            out.sigma_diff_sq(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = v;
            out.sigma_diff_sq(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return out;
}

double estimate_T(const ObservationRecord& record, const FunctionalRep& rep, const ModelChain& chain, int m)
{
    const std::size_t pos = chain.position_of(m);
    const auto coeffs = empirical_coefficients(record, chain, m);
    const auto& values = rep.values.at(pos);
    if (values.size() != coeffs.size())
        throw std::invalid_argument("functional representation does not match the chain");
    double sum = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        sum += coeffs[k] * values[k];
    return sum;
}

EstimatorBank::EstimatorBank(const FunctionalRep& rep, const CoefficientDesign& design)
{
    if (rep.values.size() != design.size())
        throw std::invalid_argument("estimator bank: representation and design cover different chains");
    weights_.resize(static_cast<Eigen::Index>(design.size()), static_cast<Eigen::Index>(design.data_size()));
    for (std::size_t pos = 0; pos < design.size(); ++pos) {
        const auto w = design.combine(rep.values[pos], pos);
        for (std::size_t i = 0; i < w.size(); ++i)
            weights_(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i)) = w[i];
    }
}

double EstimatorBank::estimate(std::span<const double> data, std::size_t pos) const
{
    if (data.size() != static_cast<std::size_t>(weights_.cols()))
        throw std::invalid_argument("estimator bank: data length mismatch");
    Eigen::Map<const Eigen::VectorXd> y(data.data(), weights_.cols());
    return weights_.row(static_cast<Eigen::Index>(pos)).dot(y);
}

void EstimatorBank::estimate_all(std::span<const double> data, std::span<double> out) const
{
    if (data.size() != static_cast<std::size_t>(weights_.cols()) || out.size() != size())
        throw std::invalid_argument("estimator bank: buffer length mismatch");
    Eigen::Map<const Eigen::VectorXd> y(data.data(), weights_.cols());
    Eigen::Map<Eigen::VectorXd>(out.data(), weights_.rows()).noalias() = weights_ * y;
}

std::vector<double> EstimatorBank::estimate_all(std::span<const double> data) const
{
    std::vector<double> out(size());
    estimate_all(data, out);
    return out;
}

} // namespace lifsel
