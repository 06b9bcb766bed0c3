#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lifsel/signal.hpp"

namespace lifsel {

enum class NoiseKind { FiniteRegression, GaussianSequence, WhiteNoise };

std::string_view to_string(NoiseKind kind);

//! Observation scheme Y(t) = <s, t> + sigma / sqrt(n) L(t).
//!
//! FiniteRegression: y_i = s(i/n) + sigma eps_i, i = 1..n.
//! GaussianSequence: Y_l = beta_l + sigma eps_l / sqrt(n).
//! WhiteNoise: the continuous model observed through the coefficients of the
//! fine Haar cells of side 2^-depth in [0,1]^dimension.
struct NoiseModel {
    NoiseKind kind = NoiseKind::FiniteRegression;
    std::size_t n = 256;
    double sigma = 0.2;
    std::size_t dimension = 1;
    int depth = 0;

    static NoiseModel regression(std::size_t n, double sigma);
    static NoiseModel sequence(std::size_t n, double sigma);
    static NoiseModel white_noise(std::size_t n, double sigma, int depth, std::size_t dimension = 1);

    void validate() const;

    //! sigma^2 / n, the variance of Y(t) for a unit-norm t.
    double unit_variance() const noexcept { return sigma * sigma / static_cast<double>(n); }

    //! Length of the data vector (regression and white noise only).
    std::size_t data_size() const;

    //! Standard deviation of each stored data entry.
    double entry_noise() const;
};

struct ObservationRecord {
    NoiseModel model;
    std::vector<double> data;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
};

//! Noiseless data plus a recipe for adding seeded noise.
class Simulator {
public:
    static Simulator regression(const Signal& signal, const NoiseModel& model);
    static Simulator white_noise(const Signal& signal, const NoiseModel& model);
    static Simulator sequence(std::vector<double> beta, const NoiseModel& model);

    const NoiseModel& model() const noexcept { return model_; }
    std::span<const double> mean() const noexcept { return mean_; }

    ObservationRecord draw(std::uint64_t seed, std::uint64_t replicate) const;
    //! Same values as draw(), written into a caller-owned buffer.
    void draw_into(std::uint64_t seed, std::uint64_t replicate, std::vector<double>& out) const;

private:
    Simulator(NoiseModel model, std::vector<double> mean);

    NoiseModel model_;
    std::vector<double> mean_;
};

ObservationRecord simulate_regression(const Signal& signal, const NoiseModel& model,
                                      std::uint64_t seed, std::uint64_t replicate);

//! Y(t) for a test function given in the record's data coordinates: grid
//! values t(i/n) for regression, coefficients <t, e_c> otherwise.
double observe_coefficient(const ObservationRecord& record, std::span<const double> t);
double observe_coefficient(const NoiseModel& model, std::span<const double> data,
                           std::span<const double> t);

//! Mean of s over each fine white-noise cell, scaled to <s, e_c>.
std::vector<double> white_noise_cell_coefficients(const Signal& signal, const NoiseModel& model);

} // namespace lifsel
