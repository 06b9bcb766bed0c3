#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lifsel/config.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/report.hpp"

namespace lifsel {

//! Worker threads to use: the request (or the hardware concurrency when 0),
//! capped by the LIFSEL_THREADS environment variable.
std::size_t worker_count(std::size_t requested = 0);

//! Runs body(replicate, worker) for replicate = 0..count-1 from a shared
//! work queue. The first exception thrown by a worker is rethrown.
void parallel_replicates(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t replicate, std::size_t worker)>& body);

struct BenchmarkOutput {
    RiskReport report;
    //! Selected levels: P1 per (signal, basis, functional), P2 per (signal, basis).
    std::vector<LevelHistogram> histograms;
};

//! Monte Carlo risk of every enabled procedure on every (signal, functional,
//! basis) cell. Replicate l of every signal uses the noise stream
//! (master_seed, l); the output does not depend on the thread count.
BenchmarkOutput run_benchmark(const ExperimentConfig& config, std::size_t threads = 0);

//! Level histograms of P1 and/or P2 (whichever the config enables).
std::vector<LevelHistogram> level_histogram(const ExperimentConfig& config, std::size_t threads = 0);

//! Writes report.csv, table.md and levels_<procedure>_<basis>.csv into
//! config.output_dir.
void write_benchmark_outputs(const BenchmarkOutput& output, const ExperimentConfig& config);

struct RateFit {
    std::vector<RatePoint> points;
    //! Slope of ln r_hat against ln(ln n / n), with its standard error.
    double slope = 0.0;
    double slope_se = 0.0;
    //! Slope of ln r_hat against ln(1/n).
    double slope_inverse_n = 0.0;
};

//! P1 risk across sample sizes. One-dimensional bases use finite regression
//! with levels 1..log2 n and derivative weights; HaarMultiD uses the white
//! noise model on cells of depth floor(log2 n / d), levels 1..that depth and
//! multivariate weights.
RateFit rate_slope(const Signal& signal, const FunctionalSpec& functional, const BasisFamily& basis,
                   std::span<const std::size_t> n_list, const ExperimentConfig& config, std::size_t threads = 0);
//! First signal, functional and basis of the config over config.n_list.
RateFit rate_slope(const ExperimentConfig& config, std::size_t threads = 0);

//! Least-squares slope of y on x with its standard error.
std::pair<double, double> fit_slope(std::span<const double> x, std::span<const double> y);

struct RegimeResult {
    double indicator_frequency = 0.0;
    LevelHistogram levels;
};

//! Interval-mean selection over Haar levels 0..m_n plus the indicator of
//! [a, b] (interval-mean weights); reports how often the indicator wins.
RegimeResult indicator_selection_frequency(const Signal& signal, double a, double b, const NoiseModel& model,
                                           std::size_t replicates, std::uint64_t seed, double p = 1.0,
                                           std::size_t threads = 0);

} // namespace lifsel
