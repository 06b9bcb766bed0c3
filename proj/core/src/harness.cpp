#include "lifsel/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "lifsel/comparators.hpp"
#include "lifsel/design.hpp"
#include "lifsel/functional.hpp"
#include "lifsel/quadrature.hpp"
#include "lifsel/rng.hpp"
#include "lifsel/selector.hpp"

namespace lifsel {

namespace {

double loss(double error, double p)
{
    const double a = std::abs(error);
    return p == 1.0 ? a : std::pow(a, p);
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

//! Sums in replicate order so the result does not depend on scheduling.
Moments moments(std::span<const double> v)
{
    Moments m;
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v)
        sum += x;
    m.mean = sum / n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v)
            ss += (x - m.mean) * (x - m.mean);
        m.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return m;
}

std::string point_label(const FunctionalSpec& f)
{
    if (f.is_point() || f.argument() == "-")
        return f.is_point() ? f.argument() : f.kind_name();
    return f.kind_name() + "(" + f.argument() + ")";
}

LevelHistogram make_histogram(std::string procedure, std::string basis, std::string signal, std::string point,
                              const ModelChain& chain, std::span<const int> levels)
{
    LevelHistogram h{std::move(procedure), std::move(basis), std::move(signal), std::move(point), {}};
    for (std::size_t pos = 0; pos < chain.size(); ++pos)
        h.counts.emplace_back(chain.label(pos), 0);
    for (int level : levels) {
        for (auto& c : h.counts) {
            if (c.first == level)
                ++c.second;
        }
    }
    return h;
}

struct FunctionalPlan {
    FunctionalRep rep;
    std::unique_ptr<EstimatorBank> bank;
    SelectorTables tables;
    std::unique_ptr<GridFunctional> grid;
};

struct BasisPlan {
    BasisFamily family;
    std::unique_ptr<ModelChain> chain;
    std::unique_ptr<CoefficientDesign> design;
    WeightSchedule weights;
    int coarse_level = 0;
    std::vector<FunctionalPlan> functionals;
};

WeightSchedule chain_weights(const ModelChain& chain, double p)
{
    return p == 1.0 ? default_weights_simulation(chain, p) : default_weights_derivative(chain, p, 0);
}

} // namespace

std::size_t worker_count(std::size_t requested)
{
    std::size_t n = requested;
    if (n == 0)
        n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LIFSEL_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0)
            n = std::min<std::size_t>(n, cap);
    }
    return n;
}

void parallel_replicates(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t, std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t r = 0; r < count; ++r)
            body(r, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (;;) {
                    if (stop.load(std::memory_order_relaxed))
                        return;
                    const std::size_t r = next.fetch_add(1, std::memory_order_relaxed);
                    if (r >= count)
                        return;
                    try {
                        body(r, w);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        stop = true;
                        return;
                    }
                }
            });
        }
    }
    if (error)
        std::rethrow_exception(error);
}

BenchmarkOutput run_benchmark(const ExperimentConfig& config, std::size_t threads)
{
    config.validate();
    const auto model = NoiseModel::regression(config.n, config.sigma);
    const bool p1 = config.has(Procedure::P1);
    const bool p2 = config.has(Procedure::P2);
    const bool p3 = config.has(Procedure::P3);
    const bool p4 = config.has(Procedure::P4);
    const std::size_t S = config.signals.size();
    const std::size_t F = config.functionals.size();
    const std::size_t N = config.replicates;

    std::vector<Signal> signals;
    std::vector<Simulator> sims;
    for (const auto& id : config.signals) {
        signals.push_back(config.resolve_signal(id));
        if (signals.back().dimension() != 1)
            throw std::invalid_argument("config field 'signals': benchmark signals must be univariate ('" + id + "')");
        sims.push_back(Simulator::regression(signals.back(), model));
    }
    std::vector<std::vector<double>> truth(S, std::vector<double>(F));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t f = 0; f < F; ++f)
            truth[s][f] = truth_functional(signals[s], config.functionals[f]);

    std::vector<BasisPlan> plans;
    if (p1 || p2 || p3) {
        const int top = dyadic_log2(config.n);
        for (const auto& family : config.bases) {
            if (family.dimension != 1)
                throw std::invalid_argument("config field 'bases': benchmarks use one-dimensional bases");
            BasisPlan plan;
            plan.family = family;
            plan.chain = std::make_unique<ModelChain>(ModelChain::dyadic(family, 1, top));
            plan.design = std::make_unique<CoefficientDesign>(*plan.chain, model);
            plan.weights = chain_weights(*plan.chain, config.p);
            plan.coarse_level = config.coarse_level(family.kind);
            for (const auto& functional : config.functionals) {
                FunctionalPlan fp;
                fp.rep = build_functional_rep(functional, *plan.chain, model, config.sigma_scale);
                fp.bank = std::make_unique<EstimatorBank>(fp.rep, *plan.design);
                fp.tables = build_selector_tables(fp.rep, plan.weights);
                if (p3)
                    fp.grid = std::make_unique<GridFunctional>(functional, family, config.n);
                plan.functionals.push_back(std::move(fp));
            }
            plans.push_back(std::move(plan));
        }
    }
    const std::size_t B = plans.size();

    std::vector<std::optional<std::vector<double>>> p4_grids(F);
    if (p4) {
        for (std::size_t f = 0; f < F; ++f) {
            if (config.functionals[f].is_integral())
                p4_grids[f] = weight_grid(config.functionals[f], config.n);
        }
    }

    // Report rows in a fixed order: signal, functional, basis, procedure; P4 last.
    RiskReport report;
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    auto index = [&](std::size_t s, std::size_t f, std::size_t b) { return (s * F + f) * B + b; };
    std::vector<std::array<std::size_t, 3>> rows_sfb(S * F * B, {none, none, none});
    std::vector<std::size_t> rows_p4(S * F, none);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t f = 0; f < F; ++f) {
            const auto& fs = config.functionals[f];
            for (std::size_t b = 0; b < B; ++b) {
                const Procedure procs[3] = {Procedure::P1, Procedure::P2, Procedure::P3};
                for (std::size_t k = 0; k < 3; ++k) {
                    if (!config.has(procs[k]))
                        continue;
                    rows_sfb[index(s, f, b)][k] = report.rows.size();
                    report.rows.push_back({std::string(to_string(procs[k])), config.signals[s], fs.kind_name(),
                                           plans[b].family.name(), fs.argument(), 0.0, 0.0, N, config.master_seed});
                }
            }
            if (p4_grids[f]) {
                rows_p4[s * F + f] = report.rows.size();
                report.rows.push_back({"P4", config.signals[s], fs.kind_name(), "-", fs.argument(), 0.0, 0.0, N,
                                       config.master_seed});
            }
        }
    }

    std::vector<double> losses(report.rows.size() * N, 0.0);
    std::vector<int> p1_levels(p1 ? S * F * B * N : 0);
    std::vector<int> p2_levels(p2 ? S * B * N : 0);

    struct Scratch {
        std::vector<double> data;
        std::vector<double> estimates;
    };
    const std::size_t workers = worker_count(threads);
    std::vector<Scratch> scratch(workers);

    parallel_replicates(N, workers, [&](std::size_t rep, std::size_t worker) {
        auto& buf = scratch[worker];
        for (std::size_t s = 0; s < S; ++s) {
            sims[s].draw_into(config.master_seed, rep, buf.data);
            const std::span<const double> data(buf.data);
            for (std::size_t b = 0; b < B; ++b) {
                const auto& plan = plans[b];
                std::size_t p2_pos = 0;
                if (p2) {
                    p2_pos = p2_select(data, *plan.chain, *plan.design).position;
                    p2_levels[(s * B + b) * N + rep] = plan.chain->label(p2_pos);
                }
                std::vector<double> recon;
                if (p3)
                    recon = p3_threshold_estimate(data, model, plan.family, plan.coarse_level);
                for (std::size_t f = 0; f < F; ++f) {
                    const auto& fp = plan.functionals[f];
                    const auto& rows = rows_sfb[index(s, f, b)];
                    if (p1 || p2) {
                        buf.estimates.resize(fp.bank->size());
                        fp.bank->estimate_all(data, buf.estimates);
                    }
                    if (p1) {
                        const auto sel = select_from_estimates(buf.estimates, fp.tables, *plan.chain, config.n);
                        losses[rows[0] * N + rep] = loss(sel.estimate - truth[s][f], config.p);
                        p1_levels[index(s, f, b) * N + rep] = sel.m_hat;
                    }
                    if (p2)
                        losses[rows[1] * N + rep] = loss(buf.estimates[p2_pos] - truth[s][f], config.p);
                    if (p3)
                        losses[rows[2] * N + rep] = loss((*fp.grid)(recon) - truth[s][f], config.p);
                }
            }
            for (std::size_t f = 0; f < F; ++f) {
                if (p4_grids[f])
                    losses[rows_p4[s * F + f] * N + rep] = loss(p4_empirical(data, *p4_grids[f]) - truth[s][f], config.p);
            }
        }
    });

    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const auto m = moments(std::span<const double>(losses).subspan(r * N, N));
        report.rows[r].r_hat = m.mean;
        report.rows[r].se = m.se;
    }

    BenchmarkOutput out;
    out.report = std::move(report);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t b = 0; b < B; ++b) {
            if (p1) {
                for (std::size_t f = 0; f < F; ++f)
                    out.histograms.push_back(make_histogram(
                        "P1", plans[b].family.name(), config.signals[s], point_label(config.functionals[f]),
                        *plans[b].chain, std::span<const int>(p1_levels).subspan(index(s, f, b) * N, N)));
            }
            if (p2)
                out.histograms.push_back(make_histogram("P2", plans[b].family.name(), config.signals[s], "all",
                                                        *plans[b].chain,
                                                        std::span<const int>(p2_levels).subspan((s * B + b) * N, N)));
        }
    }
    return out;
}

std::vector<LevelHistogram> level_histogram(const ExperimentConfig& config, std::size_t threads)
{
    if (!config.has(Procedure::P1) && !config.has(Procedure::P2))
        throw std::invalid_argument("config field 'procedures': histograms need P1 or P2");
    ExperimentConfig only = config;
    only.procedures.clear();
    for (auto proc : {Procedure::P1, Procedure::P2}) {
        if (config.has(proc))
            only.procedures.push_back(proc);
    }
    return run_benchmark(only, threads).histograms;
}

void write_benchmark_outputs(const BenchmarkOutput& output, const ExperimentConfig& config)
{
    std::filesystem::create_directories(config.output_dir);
    auto open = [&](const std::string& name) {
        std::ofstream f(config.output_dir / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + (config.output_dir / name).string());
        return f;
    };
    if (!output.report.rows.empty()) {
        auto csv = open("report.csv");
        write_report_csv(output.report, csv);
        auto md = open("table.md");
        md << emit_table(output.report, TableStyle::PaperX100);
    }
    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& h : output.histograms) {
        std::pair<std::string, std::string> key{h.procedure, h.basis};
        if (std::find(groups.begin(), groups.end(), key) == groups.end())
            groups.push_back(key);
    }
    for (const auto& [proc, basis] : groups) {
        std::vector<LevelHistogram> subset;
        for (const auto& h : output.histograms) {
            if (h.procedure == proc && h.basis == basis)
                subset.push_back(h);
        }
        auto f = open("levels_" + proc + "_" + basis + ".csv");
        write_levels_csv(subset, f);
    }
}

std::pair<double, double> fit_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("slope fit needs at least three points");
    const double k = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0)
        throw std::invalid_argument("slope fit needs distinct abscissae");
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - my - slope * (x[i] - mx);
        ssr += r * r;
    }
    return {slope, std::sqrt(ssr / (k - 2.0) / sxx)};
}

RateFit rate_slope(const Signal& signal, const FunctionalSpec& functional, const BasisFamily& basis,
                   std::span<const std::size_t> n_list, const ExperimentConfig& config, std::size_t threads)
{
    if (n_list.size() < 3)
        throw std::invalid_argument("config field 'n_list': rate fits need at least three sizes");
    if (!functional.is_point())
        throw std::invalid_argument("config field 'functionals': rates are fitted for point values");
    const std::size_t d = basis.dimension;
    if (signal.dimension() != d)
        throw std::invalid_argument("rate signal dimension does not match the basis");
    const double truth = truth_functional(signal, functional);
    const std::size_t workers = worker_count(threads);

    RateFit fit;
    for (std::size_t n : n_list) {
        if (!is_power_of_two(n))
            throw std::invalid_argument("config field 'n_list': " + std::to_string(n) + " is not a power of two");
        const int log_n = dyadic_log2(n);
        std::optional<NoiseModel> model;
        std::unique_ptr<ModelChain> chain;
        WeightSchedule weights;
        if (d == 1) {
            model = NoiseModel::regression(n, config.sigma);
            chain = std::make_unique<ModelChain>(ModelChain::dyadic(basis, 1, log_n));
            weights = default_weights_derivative(*chain, config.p, 0);
        } else {
            const int depth = log_n / static_cast<int>(d);
            if (depth < 1)
                throw std::invalid_argument("n = " + std::to_string(n) + " is too small for dimension " +
                                            std::to_string(d));
            model = NoiseModel::white_noise(n, config.sigma, depth, d);
            chain = std::make_unique<ModelChain>(ModelChain::dyadic(basis, 1, depth));
            weights = default_weights_multivariate(*chain, config.p, d);
        }
        const Simulator sim = d == 1 ? Simulator::regression(signal, *model) : Simulator::white_noise(signal, *model);
        const CoefficientDesign design(*chain, *model);
        const auto rep = build_functional_rep(functional, *chain, *model, config.sigma_scale);
        const EstimatorBank bank(rep, design);
        const auto tables = build_selector_tables(rep, weights);
        const std::uint64_t seed = replicate_stream_key(config.master_seed, n);

        std::vector<double> losses(config.replicates);
        std::vector<std::vector<double>> data(workers), est(workers);
        parallel_replicates(config.replicates, workers, [&](std::size_t r, std::size_t w) {
            sim.draw_into(seed, r, data[w]);
            est[w].resize(bank.size());
            bank.estimate_all(data[w], est[w]);
            const auto sel = select_from_estimates(est[w], tables, *chain, n);
            losses[r] = loss(sel.estimate - truth, config.p);
        });
        const auto m = moments(losses);
        fit.points.push_back({n, m.mean, m.se});
    }

    std::vector<double> x, x_inv, y;
    for (const auto& pt : fit.points) {
        const double n = static_cast<double>(pt.n);
        if (!(pt.r_hat > 0.0))
            throw std::runtime_error("rate fit: zero risk at n = " + std::to_string(pt.n));
        x.push_back(std::log(std::log(n) / n));
        x_inv.push_back(-std::log(n));
        y.push_back(std::log(pt.r_hat));
    }
    std::tie(fit.slope, fit.slope_se) = fit_slope(x, y);
    fit.slope_inverse_n = fit_slope(x_inv, y).first;
    return fit;
}

RateFit rate_slope(const ExperimentConfig& config, std::size_t threads)
{
    config.validate();
    if (config.bases.empty())
        throw std::invalid_argument("config field 'bases': rates need a basis");
    return rate_slope(config.resolve_signal(config.signals.front()), config.functionals.front(),
                      config.bases.front(), config.n_list, config, threads);
}

RegimeResult indicator_selection_frequency(const Signal& signal, double a, double b, const NoiseModel& model,
                                           std::size_t replicates, std::uint64_t seed, double p, std::size_t threads)
{
    if (replicates < 1)
        throw std::invalid_argument("regime check needs at least one replicate");
    const auto chain = ModelChain::with_indicator(a, b);
    const auto functional = FunctionalSpec::interval(a, b);
    const double truth = truth_functional(signal, functional);
    (void)truth;
    const Simulator sim = model.kind == NoiseKind::WhiteNoise ? Simulator::white_noise(signal, model)
                                                              : Simulator::regression(signal, model);
    const CoefficientDesign design(chain, model);
    const auto rep = build_functional_rep(functional, chain, model);
    const EstimatorBank bank(rep, design);
    const auto tables = build_selector_tables(rep, default_weights_interval_mean(chain, p));

    const std::size_t workers = worker_count(threads);
    std::vector<int> levels(replicates);
    std::vector<std::vector<double>> data(workers), est(workers);
    parallel_replicates(replicates, workers, [&](std::size_t r, std::size_t w) {
        sim.draw_into(seed, r, data[w]);
        est[w].resize(bank.size());
        bank.estimate_all(data[w], est[w]);
        levels[r] = select_from_estimates(est[w], tables, chain, model.n).m_hat;
    });
    RegimeResult out;
    out.levels = make_histogram("P1", "haar+indicator", signal.id(), point_label(functional), chain, levels);
    const int extra = chain.label(chain.size() - 1);
    std::size_t hits = 0;
    for (int l : levels)
        hits += l == extra ? 1 : 0;
    out.indicator_frequency = static_cast<double>(hits) / static_cast<double>(replicates);
    return out;
}

} // namespace lifsel
