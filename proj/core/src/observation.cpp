#include "lifsel/observation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lifsel/rng.hpp"

namespace lifsel {

std::string_view to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::FiniteRegression: return "regression";
    case NoiseKind::GaussianSequence: return "sequence";
    case NoiseKind::WhiteNoise: return "white-noise";
    }
    return "?";
}

NoiseModel NoiseModel::regression(std::size_t n, double sigma)
{
    NoiseModel m{NoiseKind::FiniteRegression, n, sigma, 1, 0};
    m.validate();
    return m;
}

NoiseModel NoiseModel::sequence(std::size_t n, double sigma)
{
    NoiseModel m{NoiseKind::GaussianSequence, n, sigma, 1, 0};
    m.validate();
    return m;
}

NoiseModel NoiseModel::white_noise(std::size_t n, double sigma, int depth, std::size_t dimension)
{
    NoiseModel m{NoiseKind::WhiteNoise, n, sigma, dimension, depth};
    m.validate();
    return m;
}

void NoiseModel::validate() const
{
    if (n < 1)
        throw std::invalid_argument("noise model: n must be at least 1");
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw std::invalid_argument("noise model: sigma must be finite and nonnegative");
    if (dimension < 1)
        throw std::invalid_argument("noise model: dimension must be positive");
    if (kind == NoiseKind::FiniteRegression && dimension != 1)
        throw std::invalid_argument("noise model: finite regression is one-dimensional");
    if (kind == NoiseKind::WhiteNoise) {
        if (depth < 0 || static_cast<std::size_t>(depth) * dimension > 24)
            throw std::invalid_argument("noise model: white-noise depth * dimension must lie in [0, 24]");
    }
}

std::size_t NoiseModel::data_size() const
{
    switch (kind) {
    case NoiseKind::FiniteRegression: return n;
    case NoiseKind::WhiteNoise: return std::size_t{1} << (static_cast<std::size_t>(depth) * dimension);
    case NoiseKind::GaussianSequence: break;
    }
    throw std::logic_error("noise model: sequence length is set by its coefficients");
}

double NoiseModel::entry_noise() const
{
    if (kind == NoiseKind::FiniteRegression)
        return sigma;
    return sigma / std::sqrt(static_cast<double>(n));
}

Simulator::Simulator(NoiseModel model, std::vector<double> mean)
    : model_(model), mean_(std::move(mean))
{}

Simulator Simulator::regression(const Signal& signal, const NoiseModel& model)
{
    model.validate();
    if (model.kind != NoiseKind::FiniteRegression)
        throw std::invalid_argument("simulator: regression requires a FiniteRegression model");
    if (signal.dimension() != 1)
        throw std::invalid_argument("simulator: regression signals are univariate");
    std::vector<double> mean(model.n);
    const double n = static_cast<double>(model.n);
    for (std::size_t i = 0; i < model.n; ++i)
        mean[i] = signal(static_cast<double>(i + 1) / n);
    return Simulator(model, std::move(mean));
}

Simulator Simulator::white_noise(const Signal& signal, const NoiseModel& model)
{
    model.validate();
    if (model.kind != NoiseKind::WhiteNoise)
        throw std::invalid_argument("simulator: white_noise requires a WhiteNoise model");
    return Simulator(model, white_noise_cell_coefficients(signal, model));
}

Simulator Simulator::sequence(std::vector<double> beta, const NoiseModel& model)
{
    model.validate();
    if (model.kind != NoiseKind::GaussianSequence)
        throw std::invalid_argument("simulator: sequence requires a GaussianSequence model");
    return Simulator(model, std::move(beta));
}

ObservationRecord Simulator::draw(std::uint64_t seed, std::uint64_t replicate) const
{
    ObservationRecord rec{model_, {}, seed, replicate};
    draw_into(seed, replicate, rec.data);
    return rec;
}

void Simulator::draw_into(std::uint64_t seed, std::uint64_t replicate, std::vector<double>& out) const
{
    out.resize(mean_.size());
    NoiseStream noise(seed, replicate);
    const double scale = model_.entry_noise();
    for (std::size_t i = 0; i < mean_.size(); ++i)
        out[i] = mean_[i] + scale * noise.standard_normal();
}

ObservationRecord simulate_regression(const Signal& signal, const NoiseModel& model,
                                      std::uint64_t seed, std::uint64_t replicate)
{
    return Simulator::regression(signal, model).draw(seed, replicate);
}

double observe_coefficient(const NoiseModel& model, std::span<const double> data,
                           std::span<const double> t)
{
    if (t.size() != data.size())
        throw std::invalid_argument("observe_coefficient: test function has " + std::to_string(t.size()) +
                                    " entries but the record has " + std::to_string(data.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        sum += t[i] * data[i];
    if (model.kind == NoiseKind::FiniteRegression)
        sum /= static_cast<double>(data.size());
    return sum;
}

double observe_coefficient(const ObservationRecord& record, std::span<const double> t)
{
    return observe_coefficient(record.model, record.data, t);
}

std::vector<double> white_noise_cell_coefficients(const Signal& signal, const NoiseModel& model)
{
    model.validate();
    if (model.kind != NoiseKind::WhiteNoise)
        throw std::invalid_argument("white-noise cells need a WhiteNoise model");
    const std::size_t d = model.dimension;
    if (signal.dimension() != d)
        throw std::invalid_argument("signal '" + signal.id() + "' does not match the model dimension");
    const int depth = model.depth;
    // Sub-cell midpoints per axis; total work stays near 2^22 evaluations.
    const int sub = std::max(0, static_cast<int>(22 / d) - depth);
    const int fine = depth + sub;
    const std::size_t per_axis = std::size_t{1} << fine;
    const std::size_t cells_per_axis = std::size_t{1} << depth;
    std::size_t total = 1;
    std::size_t cells = 1;
    for (std::size_t a = 0; a < d; ++a) {
        total *= per_axis;
        cells *= cells_per_axis;
    }

    std::vector<double> sums(cells, 0.0);
    std::vector<double> x(d);
    const double h = 1.0 / static_cast<double>(per_axis);
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rest = p;
        std::size_t cell = 0;
        std::size_t stride = 1;
        for (std::size_t a = 0; a < d; ++a) {
            std::size_t i = rest % per_axis;
            rest /= per_axis;
            x[a] = (static_cast<double>(i) + 0.5) * h;
            cell += (i >> sub) * stride;
            stride *= cells_per_axis;
        }
        sums[cell] += signal(std::span<const double>(x));
    }
    // <s, e_c> = 2^{depth d / 2} * integral over the cell = 2^{-depth d / 2} * cell mean.
    const double points_per_cell = static_cast<double>(total / cells);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cells));
    for (auto& v : sums)
        v = v / points_per_cell * scale;
    return sums;
}

} // namespace lifsel
