#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lifsel {

struct RiskRow {
    std::string procedure;
    std::string signal;
    std::string functional;
    std::string basis;
    std::string point;
    double r_hat = 0.0;
    double se = 0.0;
    std::size_t N = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const RiskRow&, const RiskRow&) = default;
};

struct RiskReport {
    std::vector<RiskRow> rows;

    //! First matching row or nullptr; empty basis matches any.
    const RiskRow* find(std::string_view procedure, std::string_view signal, std::string_view functional,
                        std::string_view point, std::string_view basis = {}) const;
};

enum class TableStyle { PaperX100, RawCsv };

//! Columns: procedure,signal,functional,basis,point,r_hat,se,N,seed. Reals
//! use the shortest representation that round-trips.
void write_report_csv(const RiskReport& report, std::ostream& out);
RiskReport read_report_csv(std::istream& in);

//! PaperX100: markdown tables of 100 r_hat with one decimal; point
//! functionals get one table per signal (rows = basis, a column per point
//! and procedure), integral functionals one table per basis (rows = signal).
//! RawCsv: same bytes as write_report_csv.
std::string emit_table(const RiskReport& report, TableStyle style);

struct LevelHistogram {
    std::string procedure;
    std::string basis;
    std::string signal;
    std::string point;
    //! (level, count), increasing levels, zero counts included.
    std::vector<std::pair<int, std::size_t>> counts;

    int modal_level() const;
    std::size_t total() const;
};

//! Columns: signal,point,level,count.
void write_levels_csv(std::span<const LevelHistogram> histograms, std::ostream& out);

struct RatePoint {
    std::size_t n = 0;
    double r_hat = 0.0;
    double se = 0.0;
};

//! Columns: n,r_hat,se.
void write_rates_csv(std::span<const RatePoint> points, std::ostream& out);

std::string format_real(double v);

} // namespace lifsel
