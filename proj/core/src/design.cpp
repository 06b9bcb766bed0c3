#include "lifsel/design.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lifsel {

namespace {

std::size_t data_size_of(const NoiseModel& model)
{
    if (model.kind == NoiseKind::GaussianSequence)
        throw std::invalid_argument("sequence records are indexed by coordinates, not by a wavelet chain");
    return model.data_size();
}

} // namespace

CoefficientDesign::Part CoefficientDesign::build(const ModelChain& chain, std::size_t pos, const NoiseModel& model)
{
    const std::size_t size = data_size_of(model);
    const bool regression = model.kind == NoiseKind::FiniteRegression;
    const double n = static_cast<double>(model.n);

    if (regression && chain.basis().dimension() != 1)
        throw std::invalid_argument("finite regression supports one-dimensional bases only");
    if (!regression && chain.basis().dimension() != model.dimension)
        throw std::invalid_argument("basis dimension does not match the white-noise dimension");

    if (chain.is_extra(pos)) {
        const auto& ind = *chain.extra_model();
        Eigen::MatrixXd coords(1, static_cast<Eigen::Index>(size));
        if (regression) {
            for (std::size_t i = 0; i < size; ++i)
                coords(0, static_cast<Eigen::Index>(i)) = ind.eval(static_cast<double>(i + 1) / n) / n;
        } else {
            const double h = std::ldexp(1.0, -model.depth);
            const double norm = 1.0 / (std::sqrt(h) * std::sqrt(ind.length()));
            for (std::size_t c = 0; c < size; ++c) {
                const double lo = static_cast<double>(c) * h;
                coords(0, static_cast<Eigen::Index>(c)) = ind.overlap(lo, lo + h) * norm;
            }
        }
        return Dense{std::move(coords)};
    }

    const int m = chain.label(pos);
    const std::size_t count = chain.index_count(pos);

    if (chain.family().is_haar()) {
        Blocks b;
        b.cells = count;
        b.cell.resize(size);
        if (regression) {
            if (model.n < (std::size_t{1} << m))
                throw std::invalid_argument("level " + std::to_string(m) + " needs n >= 2^" + std::to_string(m));
            for (std::size_t i = 0; i < size; ++i)
                b.cell[i] = static_cast<std::uint32_t>(haar_cell(static_cast<double>(i + 1) / n, m));
            b.coordinate = std::sqrt(std::ldexp(1.0, m)) / n;
        } else {
            if (m > model.depth)
                throw std::invalid_argument("level " + std::to_string(m) + " is finer than the white-noise cells");
            const std::size_t d = model.dimension;
            const std::size_t per_axis = std::size_t{1} << model.depth;
            const int drop = model.depth - m;
            for (std::size_t c = 0; c < size; ++c) {
                std::size_t rest = c;
                std::size_t cell = 0;
                for (std::size_t a = 0; a < d; ++a) {
                    cell |= ((rest % per_axis) >> drop) << (static_cast<std::size_t>(m) * a);
                    rest /= per_axis;
                }
                b.cell[c] = static_cast<std::uint32_t>(cell);
            }
            b.coordinate = std::pow(2.0, -0.5 * static_cast<double>(drop) * static_cast<double>(d));
        }
        return b;
    }

    // Daubechies: dense coordinates from the cascade values.
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(size));
    const auto& basis = chain.basis();
    if (regression) {
        if (model.n < (std::size_t{1} << m))
            throw std::invalid_argument("level " + std::to_string(m) + " needs n >= 2^" + std::to_string(m));
        for (std::size_t k = 0; k < count; ++k)
            for (std::size_t i = 0; i < size; ++i)
                coords(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                    basis.scaling_eval(m, static_cast<std::int64_t>(k), static_cast<double>(i + 1) / n) / n;
    } else {
        // <phi, e_c> ~ 2^{-depth/2} * mean of phi over 16 sub-midpoints of the cell.
        const double h = std::ldexp(1.0, -model.depth);
        constexpr int sub = 16;
        for (std::size_t k = 0; k < count; ++k) {
            for (std::size_t c = 0; c < size; ++c) {
                double sum = 0.0;
                for (int s = 0; s < sub; ++s)
                    sum += basis.scaling_eval(m, static_cast<std::int64_t>(k),
                                              (static_cast<double>(c) + (s + 0.5) / sub) * h);
                coords(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = sum / sub * std::sqrt(h);
            }
        }
    }
    return Dense{std::move(coords)};
}

CoefficientDesign::CoefficientDesign(const ModelChain& chain, const NoiseModel& model)
    : model_(model), data_size_(data_size_of(model))
{
    model.validate();
    parts_.reserve(chain.size());
    for (std::size_t pos = 0; pos < chain.size(); ++pos)
        parts_.push_back(build(chain, pos, model));
}

std::size_t CoefficientDesign::index_count(std::size_t pos) const
{
    const auto& part = parts_.at(pos);
    if (const auto* b = std::get_if<Blocks>(&part))
        return b->cells;
    return static_cast<std::size_t>(std::get<Dense>(part).coords.rows());
}

void CoefficientDesign::coefficients(std::span<const double> data, std::size_t pos, std::span<double> out) const
{
    if (data.size() != data_size_)
        throw std::invalid_argument("data length " + std::to_string(data.size()) + " does not match the design (" +
                                    std::to_string(data_size_) + ")");
    if (out.size() != index_count(pos))
        throw std::invalid_argument("coefficient buffer has the wrong length");
    const auto& part = parts_[pos];
    if (const auto* b = std::get_if<Blocks>(&part)) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < data.size(); ++i)
            out[b->cell[i]] += data[i];
        for (auto& v : out)
            v *= b->coordinate;
        return;
    }
    const auto& coords = std::get<Dense>(part).coords;
    Eigen::Map<const Eigen::VectorXd> y(data.data(), static_cast<Eigen::Index>(data.size()));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())).noalias() = coords * y;
}

std::vector<double> CoefficientDesign::coefficients(std::span<const double> data, std::size_t pos) const
{
    std::vector<double> out(index_count(pos));
    coefficients(data, pos, out);
    return out;
}

std::vector<double> CoefficientDesign::combine(std::span<const double> weights, std::size_t pos) const
{
    if (weights.size() != index_count(pos))
        throw std::invalid_argument("weight vector has the wrong length");
    std::vector<double> v(data_size_, 0.0);
    const auto& part = parts_[pos];
    if (const auto* b = std::get_if<Blocks>(&part)) {
        for (std::size_t i = 0; i < data_size_; ++i)
            v[i] = weights[b->cell[i]] * b->coordinate;
        return v;
    }
    const auto& coords = std::get<Dense>(part).coords;
    Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
    Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).noalias() = coords.transpose() * w;
    return v;
}

std::vector<double> CoefficientDesign::grid_fit(std::span<const double> coeffs, std::size_t pos) const
{
    if (model_.kind != NoiseKind::FiniteRegression)
        throw std::invalid_argument("grid fits are defined for finite regression only");
    auto v = combine(coeffs, pos);
    const double n = static_cast<double>(model_.n);
    for (auto& x : v)
        x *= n;
    return v;
}

std::vector<double> empirical_coefficients(const ObservationRecord& record, const ModelChain& chain, int m)
{
    const std::size_t pos = chain.position_of(m);
    if (record.data.size() != data_size_of(record.model))
        throw std::invalid_argument("record data length does not match its noise model");
    CoefficientDesign::Part part = CoefficientDesign::build(chain, pos, record.model);
    const std::size_t count = chain.index_count(pos);
    std::vector<double> out(count, 0.0);
    if (const auto* b = std::get_if<CoefficientDesign::Blocks>(&part)) {
        for (std::size_t i = 0; i < record.data.size(); ++i)
            out[b->cell[i]] += record.data[i];
        for (auto& v : out)
            v *= b->coordinate;
        return out;
    }
    const auto& coords = std::get<CoefficientDesign::Dense>(part).coords;
    Eigen::Map<const Eigen::VectorXd> y(record.data.data(), static_cast<Eigen::Index>(record.data.size()));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(count)).noalias() = coords * y;
    return out;
}

} // namespace lifsel
