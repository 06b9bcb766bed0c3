#include "lifsel/report.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lifsel {

namespace {

constexpr std::string_view kHeader = "procedure,signal,functional,basis,point,r_hat,se,N,seed";

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line, std::string_view column)
{
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::runtime_error("report.csv line " + std::to_string(line) + ": bad " + std::string(column) + " '" +
                                 text + "'");
    return v;
}

void check_text(const std::string& s)
{
    if (s.find_first_of(",\n\"") != std::string::npos)
        throw std::invalid_argument("report field '" + s + "' contains a comma, quote or newline");
}

std::string cell(const RiskRow* row)
{
    return row ? fmt::format("{:.1f}", 100.0 * row->r_hat) : std::string("-");
}

template <typename T>
void push_unique(std::vector<T>& v, const T& x)
{
    if (std::find(v.begin(), v.end(), x) == v.end())
        v.push_back(x);
}

bool is_point(const RiskRow& r)
{
    return r.functional == "point";
}

std::string column_label(const RiskRow& r)
{
    if (r.functional == "interval")
        return "[" + r.point + "]";
    if (r.point == "-")
        return r.functional;
    return r.functional + "(" + r.point + ")";
}

} // namespace

const RiskRow* RiskReport::find(std::string_view procedure, std::string_view signal, std::string_view functional,
                                std::string_view point, std::string_view basis) const
{
    for (const auto& r : rows) {
        if (r.procedure == procedure && r.signal == signal && r.functional == functional && r.point == point &&
            (basis.empty() || r.basis == basis))
            return &r;
    }
    return nullptr;
}

std::string format_real(double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_report_csv(const RiskReport& report, std::ostream& out)
{
    out << kHeader << '\n';
    for (const auto& r : report.rows) {
        for (const auto* s : {&r.procedure, &r.signal, &r.functional, &r.basis, &r.point})
            check_text(*s);
        out << r.procedure << ',' << r.signal << ',' << r.functional << ',' << r.basis << ',' << r.point << ','
            << format_real(r.r_hat) << ',' << format_real(r.se) << ',' << r.N << ',' << r.seed << '\n';
    }
}

RiskReport read_report_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw std::runtime_error("report.csv: missing or unexpected header");
    RiskReport report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto f = split_csv(line);
        if (f.size() != 9)
            throw std::runtime_error("report.csv line " + std::to_string(line_no) + ": expected 9 columns");
        RiskRow r;
        r.procedure = f[0];
        r.signal = f[1];
        r.functional = f[2];
        r.basis = f[3];
        r.point = f[4];
        r.r_hat = parse_field<double>(f[5], line_no, "r_hat");
        r.se = parse_field<double>(f[6], line_no, "se");
        r.N = parse_field<std::size_t>(f[7], line_no, "N");
        r.seed = parse_field<std::uint64_t>(f[8], line_no, "seed");
        report.rows.push_back(std::move(r));
    }
    return report;
}

std::string emit_table(const RiskReport& report, TableStyle style)
{
    if (report.rows.empty())
        throw std::invalid_argument("emit_table: empty report");
    if (style == TableStyle::RawCsv) {
        std::ostringstream out;
        write_report_csv(report, out);
        return out.str();
    }

    std::vector<std::string> signals, bases, procedures, points, integrals;
    for (const auto& r : report.rows) {
        push_unique(signals, r.signal);
        push_unique(procedures, r.procedure);
        if (r.basis != "-")
            push_unique(bases, r.basis);
        if (is_point(r))
            push_unique(points, r.point);
        else
            push_unique(integrals, column_label(r));
    }
    std::sort(procedures.begin(), procedures.end());

    auto lookup = [&](const std::string& proc, const std::string& signal, const std::string& label,
                      const std::string& basis, bool point) -> const RiskRow* {
        for (const auto& r : report.rows) {
            if (r.procedure != proc || r.signal != signal || is_point(r) != point)
                continue;
            if ((point ? r.point : column_label(r)) != label)
                continue;
            if (r.basis == basis || r.basis == "-")
                return &r;
        }
        return nullptr;
    };

    std::string out;
    for (const auto& signal : signals) {
        std::vector<std::string> cols;
        for (const auto& pt : points) {
            bool any = false;
            for (const auto& r : report.rows)
                any = any || (r.signal == signal && is_point(r) && r.point == pt);
            if (any)
                cols.push_back(pt);
        }
        if (cols.empty())
            continue;
        out += fmt::format("### {}: point values (100 x r_hat)\n\n| basis |", signal);
        std::string rule = "|---|";
        for (const auto& pt : cols) {
            for (const auto& proc : procedures) {
                if (proc == "P4")
                    continue;
                out += fmt::format(" x={} {} |", pt, proc);
                rule += "---:|";
            }
        }
        out += "\n" + rule + "\n";
        for (const auto& basis : bases) {
            out += "| " + basis + " |";
            for (const auto& pt : cols) {
                for (const auto& proc : procedures) {
                    if (proc != "P4")
                        out += " " + cell(lookup(proc, signal, pt, basis, true)) + " |";
                }
            }
            out += "\n";
        }
        out += "\n";
    }

    if (!integrals.empty()) {
        for (const auto& basis : bases) {
            out += fmt::format("### integral functionals, {} (100 x r_hat)\n\n| signal |", basis);
            std::string rule = "|---|";
            for (const auto& label : integrals) {
                for (const auto& proc : procedures) {
                    out += fmt::format(" {} {} |", label, proc);
                    rule += "---:|";
                }
            }
            out += "\n" + rule + "\n";
            for (const auto& signal : signals) {
                out += "| " + signal + " |";
                for (const auto& label : integrals) {
                    for (const auto& proc : procedures)
                        out += " " + cell(lookup(proc, signal, label, basis, false)) + " |";
                }
                out += "\n";
            }
            out += "\n";
        }
    }
    return out;
}

int LevelHistogram::modal_level() const
{
    if (counts.empty())
        throw std::logic_error("empty histogram");
    auto best = counts.front();
    for (const auto& c : counts) {
        if (c.second > best.second)
            best = c;
    }
    return best.first;
}

std::size_t LevelHistogram::total() const
{
    std::size_t t = 0;
    for (const auto& c : counts)
        t += c.second;
    return t;
}

void write_levels_csv(std::span<const LevelHistogram> histograms, std::ostream& out)
{
    out << "signal,point,level,count\n";
    for (const auto& h : histograms) {
        for (const auto& [level, count] : h.counts)
            out << h.signal << ',' << h.point << ',' << level << ',' << count << '\n';
    }
}

void write_rates_csv(std::span<const RatePoint> points, std::ostream& out)
{
    out << "n,r_hat,se\n";
    for (const auto& p : points)
        out << p.n << ',' << format_real(p.r_hat) << ',' << format_real(p.se) << '\n';
}

} // namespace lifsel
