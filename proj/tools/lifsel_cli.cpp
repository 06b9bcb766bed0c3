//! lifsel: Monte Carlo benchmarks, level histograms, rate fits and tables.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lifsel/config.hpp"
#include "lifsel/harness.hpp"
#include "lifsel/report.hpp"
#include "lifsel/wavelet.hpp"

namespace {

struct Common {
    std::size_t threads = 0;
    std::string output_dir;
    std::string sigma_scale;
};

void add_common(CLI::App& sub, Common& common)
{
    sub.add_option("-j,--threads", common.threads, "Worker threads (0 = all cores, capped by LIFSEL_THREADS)");
    sub.add_option("-o,--output-dir", common.output_dir, "Override output_dir from the config");
    sub.add_option("--sigma-scale", common.sigma_scale, "Override sigma_scale (definition-1 or paper-4.2)");
}

lifsel::ExperimentConfig load(const std::string& path, const Common& common)
{
    auto config = lifsel::load_config(path);
    if (!common.output_dir.empty())
        config.output_dir = common.output_dir;
    if (!common.sigma_scale.empty())
        config.sigma_scale = lifsel::parse_variance_scale(common.sigma_scale);
    return config;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive estimation of linear functionals by model selection"};
    app.require_subcommand(1);

    Common common;
    std::string config_path;
    std::string report_path;
    std::string style = "paper-x100";
    std::string table_out;
    int cascade_depth = 14;
    std::string cascade_out = "d20_cascade.csv";

    auto* bench = app.add_subcommand("benchmark", "Risk of every procedure on the config grid");
    bench->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    add_common(*bench, common);

    auto* hist = app.add_subcommand("histogram", "Histograms of the selected levels (P1/P2)");
    hist->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    add_common(*hist, common);

    auto* rates = app.add_subcommand("rates", "P1 risk across n_list and the fitted rate exponent");
    rates->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
    add_common(*rates, common);

    auto* tables = app.add_subcommand("tables", "Render a report.csv as tables");
    tables->add_option("report", report_path, "report.csv")->required()->check(CLI::ExistingFile);
    tables->add_option("--style", style, "paper-x100 or raw-csv")
        ->check(CLI::IsMember({"paper-x100", "raw-csv"}));
    tables->add_option("-o,--output", table_out, "Write to a file instead of stdout");

    auto* cascade = app.add_subcommand("cascade", "Export the D20 scaling function table");
    cascade->add_option("--depth", cascade_depth, "Dyadic depth of the nodes")->check(CLI::Range(10, 20));
    cascade->add_option("-o,--output", cascade_out, "CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto start = std::chrono::steady_clock::now();
        if (bench->parsed()) {
            const auto config = load(config_path, common);
            const auto out = lifsel::run_benchmark(config, common.threads);
            lifsel::write_benchmark_outputs(out, config);
            std::cout << lifsel::emit_table(out.report, lifsel::TableStyle::PaperX100);
            fmt::print(stderr, "{} rows, N = {}, {:.1f} s, written to {}\n", out.report.rows.size(),
                       config.replicates, seconds_since(start), config.output_dir.string());
        } else if (hist->parsed()) {
            const auto config = load(config_path, common);
            lifsel::BenchmarkOutput out;
            out.histograms = lifsel::level_histogram(config, common.threads);
            lifsel::write_benchmark_outputs(out, config);
            for (const auto& h : out.histograms) {
                fmt::print("{} {} {} {}: modal level {}\n", h.procedure, h.basis, h.signal, h.point,
                           h.modal_level());
            }
            fmt::print(stderr, "{:.1f} s, written to {}\n", seconds_since(start), config.output_dir.string());
        } else if (rates->parsed()) {
            const auto config = load(config_path, common);
            const auto fit = lifsel::rate_slope(config, common.threads);
            std::filesystem::create_directories(config.output_dir);
            auto csv = open_output(config.output_dir / "rates.csv");
            lifsel::write_rates_csv(fit.points, csv);
            for (const auto& pt : fit.points)
                fmt::print("n = {:6d}  r_hat = {:.6f}  se = {:.6f}\n", pt.n, pt.r_hat, pt.se);
            fmt::print("slope vs ln(ln n / n) = {:.4f} (se {:.4f}); slope vs ln(1/n) = {:.4f}\n", fit.slope,
                       fit.slope_se, fit.slope_inverse_n);
            fmt::print(stderr, "{:.1f} s, written to {}\n", seconds_since(start), config.output_dir.string());
        } else if (tables->parsed()) {
            std::ifstream in(report_path, std::ios::binary);
            const auto report = lifsel::read_report_csv(in);
            const auto text = lifsel::emit_table(
                report, style == "raw-csv" ? lifsel::TableStyle::RawCsv : lifsel::TableStyle::PaperX100);
            if (table_out.empty()) {
                std::cout << text;
            } else {
                auto out = open_output(table_out);
                out << text;
            }
        } else if (cascade->parsed()) {
            auto out = open_output(cascade_out);
            lifsel::daubechies20_cascade(cascade_depth)->write_csv(out);
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
