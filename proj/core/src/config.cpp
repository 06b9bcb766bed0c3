#include "lifsel/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <stdexcept>

#include "lifsel/comparators.hpp"
#include "lifsel/expression.hpp"
#include "lifsel/quadrature.hpp"

namespace lifsel {

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i < s.size() && s[i] == '(')
            ++depth;
        else if (i < s.size() && s[i] == ')')
            --depth;
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            auto item = trim(s.substr(start, i - start));
            if (!item.empty())
                out.push_back(std::move(item));
            start = i + 1;
        }
    }
    return out;
}

[[noreturn]] void field_error(std::string_view field, std::size_t line, const std::string& what)
{
    throw std::invalid_argument("config line " + std::to_string(line) + ", field '" + std::string(field) + "': " + what);
}

template <typename T>
T parse_integer(std::string_view field, std::size_t line, const std::string& text)
{
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        field_error(field, line, "expected a nonnegative integer, got '" + text + "'");
    return v;
}

double parse_real(std::string_view field, std::size_t line, const std::string& text)
{
    try {
        return evaluate_constant(text);
    } catch (const std::exception& e) {
        field_error(field, line, e.what());
    }
}

struct Piece {
    double lo;
    double hi;
    bool lo_closed;
    bool hi_closed;
    Expression expr;
};

struct SignalBuilder {
    std::string id;
    std::size_t dimension = 1;
    int depth = 16;
    std::optional<Expression> formula;
    std::vector<Piece> pieces;
    std::optional<Expression> otherwise;
    std::size_t line = 0;

    Signal build() const
    {
        if (formula && (!pieces.empty() || otherwise))
            field_error("signal " + id, line, "use either formula or piece/otherwise entries");
        if (!formula && pieces.empty())
            field_error("signal " + id, line, "needs a formula or at least one piece");
        if (!pieces.empty() && dimension != 1)
            field_error("signal " + id, line, "pieces are defined for one-dimensional signals");
        auto check_arity = [&](const Expression& e) {
            if (e.arity() > dimension)
                field_error("signal " + id, line, "expression '" + e.source() + "' reads more coordinates than the dimension");
        };
        if (formula)
            check_arity(*formula);
        for (const auto& p : pieces)
            check_arity(p.expr);
        if (otherwise)
            check_arity(*otherwise);

        if (formula) {
            return Signal(id, dimension, [e = *formula](std::span<const double> x) { return e.evaluate(x); }, depth);
        }
        auto ps = std::make_shared<const std::vector<Piece>>(pieces);
        auto other = otherwise;
        return Signal(id, dimension,
                      [ps, other](std::span<const double> x) {
                          const double v = x[0];
                          for (const auto& p : *ps) {
                              const bool above = p.lo_closed ? v >= p.lo : v > p.lo;
                              const bool below = p.hi_closed ? v <= p.hi : v < p.hi;
                              if (above && below)
                                  return p.expr.evaluate(x);
                          }
                          return other ? other->evaluate(x) : 0.0;
                      },
                      depth);
    }
};

Piece parse_piece(const std::string& text, std::size_t line)
{
    const std::string s = trim(text);
    if (s.empty() || (s[0] != '(' && s[0] != '['))
        field_error("piece", line, "expected '(lo, hi] expression'");
    const auto close = s.find_first_of(")]");
    if (close == std::string::npos)
        field_error("piece", line, "unterminated interval");
    const auto bounds = split_list(std::string_view(s).substr(1, close - 1));
    if (bounds.size() != 2)
        field_error("piece", line, "interval needs two bounds");
    const std::string expr = trim(std::string_view(s).substr(close + 1));
    if (expr.empty())
        field_error("piece", line, "missing expression");
    try {
        return Piece{evaluate_constant(bounds[0]), evaluate_constant(bounds[1]), s[0] == '[', s[close] == ']',
                     Expression::parse(expr)};
    } catch (const std::invalid_argument& e) {
        field_error("piece", line, e.what());
    }
}

} // namespace

std::string_view to_string(Procedure p)
{
    switch (p) {
    case Procedure::P1: return "P1";
    case Procedure::P2: return "P2";
    case Procedure::P3: return "P3";
    case Procedure::P4: return "P4";
    }
    return "?";
}

Procedure parse_procedure(std::string_view text)
{
    if (text == "P1" || text == "p1") return Procedure::P1;
    if (text == "P2" || text == "p2") return Procedure::P2;
    if (text == "P3" || text == "p3") return Procedure::P3;
    if (text == "P4" || text == "p4") return Procedure::P4;
    throw std::invalid_argument("unknown procedure '" + std::string(text) + "' (expected P1..P4)");
}

bool ExperimentConfig::has(Procedure proc) const
{
    return std::find(procedures.begin(), procedures.end(), proc) != procedures.end();
}

Signal ExperimentConfig::resolve_signal(const std::string& id) const
{
    if (auto it = custom_signals.find(id); it != custom_signals.end())
        return it->second;
    if (is_builtin_signal(id))
        return builtin_signal(id);
    throw std::invalid_argument("field 'signals': unknown signal '" + id + "'");
}

int ExperimentConfig::coarse_level(BasisKind kind) const
{
    if (auto it = keep_coarse_level.find(kind); it != keep_coarse_level.end())
        return it->second;
    return default_keep_coarse_level(kind);
}

void ExperimentConfig::validate() const
{
    auto fail = [](std::string_view field, const std::string& what) {
        throw std::invalid_argument("config field '" + std::string(field) + "': " + what);
    };
    if (signals.empty())
        fail("signals", "at least one signal is required");
    for (const auto& id : signals)
        resolve_signal(id);
    if (functionals.empty())
        fail("functionals", "at least one functional is required");
    if (procedures.empty())
        fail("procedures", "at least one procedure is required");
    if (replicates < 1)
        fail("replicates", "must be at least 1");
    if (!(p >= 1.0) || !std::isfinite(p))
        fail("p", "risk exponent must be at least 1");
    if (n < 1)
        fail("n", "must be at least 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        fail("sigma", "must be finite and nonnegative");
    const bool wavelet = has(Procedure::P1) || has(Procedure::P2) || has(Procedure::P3);
    if (wavelet) {
        if (bases.empty())
            fail("bases", "P1-P3 need at least one basis");
        if (!is_power_of_two(n))
            fail("n", "must be a power of two when a wavelet procedure is enabled");
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (!is_power_of_two(n_list[i]))
            fail("n_list", std::to_string(n_list[i]) + " is not a power of two");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            fail("n_list", "sizes must be increasing");
    }
    if (wavelet) {
        const int top = dyadic_log2(n);
        for (const auto& [kind, level] : keep_coarse_level) {
            if (level < 0 || level > top)
                fail("keep_coarse_level", "must lie in [0, " + std::to_string(top) + "]");
        }
    }
}

ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig cfg;
    std::optional<SignalBuilder> section;
    std::vector<SignalBuilder> builders;
    int cascade_depth = 14;
    std::vector<std::string> basis_names;
    std::vector<std::pair<std::string, std::size_t>> keep_entries;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                field_error("section", line_no, "unterminated section header");
            const std::string head = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!head.starts_with("signal "))
                field_error("section", line_no, "unknown section '" + head + "'");
            if (section)
                builders.push_back(std::move(*section));
            section = SignalBuilder{};
            section->id = trim(std::string_view(head).substr(7));
            section->line = line_no;
            if (section->id.empty() || section->id.find_first_of(",\" ") != std::string::npos)
                field_error("section", line_no, "signal names must be nonempty without spaces, commas or quotes");
            if (is_builtin_signal(section->id))
                field_error("section", line_no, "'" + section->id + "' is a built-in signal");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            field_error("?", line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));

        if (section) {
            auto& s = *section;
            try {
                if (key == "dimension")
                    s.dimension = parse_integer<std::size_t>(key, line_no, value);
                else if (key == "truth_quadrature_depth")
                    s.depth = parse_integer<int>(key, line_no, value);
                else if (key == "formula")
                    s.formula = Expression::parse(value);
                else if (key == "piece")
                    s.pieces.push_back(parse_piece(value, line_no));
                else if (key == "otherwise")
                    s.otherwise = Expression::parse(value);
                else
                    field_error(key, line_no, "unknown signal field");
            } catch (const std::invalid_argument& e) {
                if (std::string_view(e.what()).starts_with("config line"))
                    throw;
                field_error(key, line_no, e.what());
            }
            continue;
        }

        if (key == "signals") {
            cfg.signals = split_list(value);
        } else if (key == "functionals") {
            cfg.functionals.clear();
            for (const auto& item : split_list(value)) {
                try {
                    cfg.functionals.push_back(parse_functional(item));
                } catch (const std::exception& e) {
                    field_error(key, line_no, e.what());
                }
            }
        } else if (key == "bases") {
            basis_names = split_list(value);
        } else if (key == "procedures") {
            cfg.procedures.clear();
            for (const auto& item : split_list(value)) {
                try {
                    cfg.procedures.push_back(parse_procedure(item));
                } catch (const std::exception& e) {
                    field_error(key, line_no, e.what());
                }
            }
        } else if (key == "n") {
            cfg.n = parse_integer<std::size_t>(key, line_no, value);
        } else if (key == "sigma") {
            cfg.sigma = parse_real(key, line_no, value);
        } else if (key == "replicates" || key == "N") {
            cfg.replicates = parse_integer<std::size_t>(key, line_no, value);
        } else if (key == "p") {
            cfg.p = parse_real(key, line_no, value);
        } else if (key == "master_seed") {
            cfg.master_seed = parse_integer<std::uint64_t>(key, line_no, value);
        } else if (key == "sigma_scale") {
            try {
                cfg.sigma_scale = parse_variance_scale(value);
            } catch (const std::exception& e) {
                field_error(key, line_no, e.what());
            }
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "n_list") {
            cfg.n_list.clear();
            for (const auto& item : split_list(value))
                cfg.n_list.push_back(parse_integer<std::size_t>(key, line_no, item));
        } else if (key == "keep_coarse_level") {
            for (const auto& item : split_list(value))
                keep_entries.emplace_back(item, line_no);
        } else if (key == "cascade_depth") {
            cascade_depth = parse_integer<int>(key, line_no, value);
        } else {
            field_error(key, line_no, "unknown field");
        }
    }
    if (section)
        builders.push_back(std::move(*section));

    for (const auto& b : builders) {
        if (cfg.custom_signals.count(b.id))
            field_error("signal " + b.id, b.line, "defined twice");
        cfg.custom_signals.emplace(b.id, b.build());
    }
    for (const auto& name : basis_names) {
        try {
            auto basis = parse_basis(name);
            if (basis.kind == BasisKind::Daubechies20)
                basis = BasisFamily::daubechies20(cascade_depth);
            cfg.bases.push_back(basis);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("config field 'bases': ") + e.what());
        }
    }
    for (const auto& [entry, line] : keep_entries) {
        const auto colon = entry.find(':');
        if (colon == std::string::npos) {
            const int level = parse_integer<int>("keep_coarse_level", line, entry);
            for (auto kind : {BasisKind::Haar1D, BasisKind::Daubechies20, BasisKind::HaarMultiD})
                cfg.keep_coarse_level[kind] = level;
        } else {
            BasisFamily basis;
            try {
                basis = parse_basis(trim(std::string_view(entry).substr(0, colon)));
            } catch (const std::exception& e) {
                field_error("keep_coarse_level", line, e.what());
            }
            cfg.keep_coarse_level[basis.kind] =
                parse_integer<int>("keep_coarse_level", line, trim(std::string_view(entry).substr(colon + 1)));
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path.string() + "'");
    return parse_config(in);
}

} // namespace lifsel
