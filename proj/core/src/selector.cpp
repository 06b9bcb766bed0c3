#include "lifsel/selector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace lifsel {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_nonnegative(double v, const char* what)
{
    if (!(v >= 0.0))
        throw std::invalid_argument(std::string(what) + " must be nonnegative");
}

Eigen::MatrixXd square(std::size_t n)
{
    return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

void require_nested(const ModelChain& chain, const char* who)
{
    if (chain.extra_model())
        throw std::invalid_argument(std::string(who) + ": chain must not carry an indicator model");
}

void write_number(std::ostream& out, double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, r.ptr - buf);
}

} // namespace

WeightSchedule WeightSchedule::user(std::vector<double> x_m, Eigen::MatrixXd x_jm)
{
    WeightSchedule w;
    w.x_m = std::move(x_m);
    w.x_jm = std::move(x_jm);
    w.provenance = WeightProvenance::UserSupplied;
    w.validate();
    return w;
}

void WeightSchedule::validate() const
{
    const auto n = static_cast<Eigen::Index>(x_m.size());
    if (x_jm.rows() != n || x_jm.cols() != n)
        throw std::invalid_argument("weight schedule: x_jm must be square with one row per model");
    for (double v : x_m)
        check_nonnegative(v, "weight x_m");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (x_jm(j, j) != 0.0)
            throw std::invalid_argument("weight schedule: x_mm must be exactly zero");
        for (Eigen::Index m = 0; m < n; ++m)
            check_nonnegative(x_jm(j, m), "weight x_jm");
    }
}

WeightSchedule default_weights_derivative(const ModelChain& chain, double p, int r)
{
    require_nested(chain, "derivative weights");
    if (!(p >= 1.0))
        throw std::invalid_argument("derivative weights: p must be at least 1");
    if (r < 0)
        throw std::invalid_argument("derivative weights: r must be nonnegative");
    const std::size_t n = chain.size();
    const double a = 1.0 + 2.0 * r;
    WeightSchedule w;
    w.provenance = WeightProvenance::Derivative;
    w.p = p;
    w.r = r;
    w.x_m.resize(n);
    w.x_jm = square(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double lj = chain.label(j);
        w.x_m[j] = 0.5 * p * lj * a * kLn2;
        for (std::size_t m = 0; m < j; ++m) {
            const double lm = chain.label(m);
            // ln(2^{a j} - 2^{a m}) without forming the powers.
            const double v = 0.5 * p * (a * lj * kLn2 + std::log1p(-std::exp2(a * (lm - lj))));
            w.x_jm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = std::max(0.0, v);
            w.x_jm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = std::max(0.0, v);
        }
    }
    return w;
}

WeightSchedule default_weights_simulation(const ModelChain& chain, double p)
{
    auto w = default_weights_derivative(chain, p, 0);
    w.provenance = WeightProvenance::Simulation;
    return w;
}

WeightSchedule default_weights_interval_mean(const ModelChain& chain, double p)
{
    if (!chain.extra_model())
        throw std::invalid_argument("interval-mean weights: chain needs the indicator model");
    if (chain.family().kind != BasisKind::Haar1D)
        throw std::invalid_argument("interval-mean weights: Haar chain required");
    if (!(p >= 1.0))
        throw std::invalid_argument("interval-mean weights: p must be at least 1");
    const double h = chain.extra_model()->length();
    if (!(h > 0.0 && h <= 1.0))
        throw std::invalid_argument("interval-mean weights: H must lie in (0, 1]");
    const auto levels = chain.levels();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] != static_cast<int>(i))
            throw std::invalid_argument("interval-mean weights: Haar levels must be 0..m_n");
    }
    const int top = levels.back();
    if (std::ldexp(h, top) > 1.0 || std::ldexp(h, top + 1) <= 1.0)
        throw std::invalid_argument("interval-mean weights: last Haar level must be sup{m : 2^m <= 1/H}");

    const std::size_t n = chain.size();
    WeightSchedule w;
    w.provenance = WeightProvenance::IntervalMean;
    w.p = p;
    w.x_m.resize(n);
    w.x_jm = square(n);
    for (std::size_t j = 0; j < n; ++j) {
        w.x_m[j] = chain.is_extra(j) ? 0.5 * p * std::log(1.0 / h) : 0.5 * p * chain.label(j);
        for (std::size_t m = 0; m < j; ++m) {
            const double v = 0.5 * p * std::max(chain.label(j), chain.label(m));
            w.x_jm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = v;
            w.x_jm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return w;
}

WeightSchedule default_weights_multivariate(const ModelChain& chain, double p, std::size_t d)
{
    require_nested(chain, "multivariate weights");
    if (!chain.family().is_haar() || chain.basis().dimension() != d)
        throw std::invalid_argument("multivariate weights: Haar chain of dimension d required");
    if (!(p >= 1.0))
        throw std::invalid_argument("multivariate weights: p must be at least 1");
    const std::size_t n = chain.size();
    const double scale = 0.5 * p * static_cast<double>(d) * kLn2;
    WeightSchedule w;
    w.provenance = WeightProvenance::Multivariate;
    w.p = p;
    w.d = d;
    w.x_m.resize(n);
    w.x_jm = square(n);
    for (std::size_t j = 0; j < n; ++j) {
        w.x_m[j] = scale * chain.label(j);
        for (std::size_t m = 0; m < j; ++m) {
            const double v = scale * std::max(chain.label(j), chain.label(m));
            w.x_jm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = v;
            w.x_jm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return w;
}

double penalty(double x_m, double sigma_m)
{
    check_nonnegative(x_m, "x_m");
    check_nonnegative(sigma_m, "sigma_m");
    return std::sqrt(2.0 * x_m) * sigma_m;
}

double deviation_bound(double x_jm, double sigma_jm)
{
    check_nonnegative(x_jm, "x_jm");
    check_nonnegative(sigma_jm, "sigma_jm");
    return std::sqrt(2.0 * x_jm) * sigma_jm;
}

std::vector<double> crit_hat(std::span<const double> estimates, const Eigen::MatrixXd& H, std::span<const double> pen)
{
    const std::size_t n = estimates.size();
    if (pen.size() != n || H.rows() != static_cast<Eigen::Index>(n) || H.cols() != static_cast<Eigen::Index>(n))
        throw std::invalid_argument("crit_hat: tables cover different model lists");
    std::vector<double> crit(n);
    for (std::size_t m = 0; m < n; ++m) {
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t j = m; j < n; ++j) {
            const double v =
                std::abs(estimates[m] - estimates[j]) - H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m));
            sup = std::max(sup, v);
        }
        crit[m] = sup + pen[m];
    }
    return crit;
}

std::size_t select_m_hat(std::span<const double> crit, std::size_t n)
{
    if (crit.empty())
        throw std::invalid_argument("select_m_hat: empty model list");
    if (n == 0)
        throw std::invalid_argument("select_m_hat: n must be positive");
    const double bound = *std::min_element(crit.begin(), crit.end()) + 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < crit.size(); ++m) {
        if (crit[m] <= bound)
            return m;
    }
    return crit.size() - 1;
}

SelectorTables build_selector_tables(const FunctionalRep& rep, const WeightSchedule& weights)
{
    const std::size_t n = rep.sigma_sq.size();
    if (weights.x_m.size() != n || weights.x_jm.rows() != static_cast<Eigen::Index>(n))
        throw std::invalid_argument("weights and functional representation cover different chains");
    SelectorTables t;
    t.pen.resize(n);
    t.H = square(n);
    for (std::size_t m = 0; m < n; ++m) {
        t.pen[m] = penalty(weights.x_m[m], std::sqrt(rep.sigma_sq[m]));
        for (std::size_t j = 0; j < n; ++j) {
            if (j == m)
                continue;
            const auto jj = static_cast<Eigen::Index>(j);
            const auto mm = static_cast<Eigen::Index>(m);
            t.H(jj, mm) = deviation_bound(weights.x_jm(jj, mm), std::sqrt(rep.sigma_diff_sq(jj, mm)));
        }
    }
    return t;
}

SelectionResult select_from_estimates(std::span<const double> estimates, const SelectorTables& tables,
                                      const ModelChain& chain, std::size_t n)
{
    if (estimates.size() != chain.size())
        throw std::invalid_argument("select: one estimate per model is required");
    SelectionResult r;
    r.estimates.assign(estimates.begin(), estimates.end());
    r.pen = tables.pen;
    r.crit_hat = crit_hat(estimates, tables.H, tables.pen);
    r.sup_deviation.resize(r.crit_hat.size());
    for (std::size_t m = 0; m < r.crit_hat.size(); ++m)
        r.sup_deviation[m] = r.crit_hat[m] - r.pen[m];
    r.position = select_m_hat(r.crit_hat, n);
    r.m_hat = chain.label(r.position);
    r.estimate = estimates[r.position];
    return r;
}

SelectionResult select(const ObservationRecord& record, const ModelChain& chain, const FunctionalRep& rep,
                       const WeightSchedule& weights, std::size_t n)
{
    std::vector<double> estimates(chain.size());
    for (std::size_t pos = 0; pos < chain.size(); ++pos)
        estimates[pos] = estimate_T(record, rep, chain, chain.label(pos));
    return select_from_estimates(estimates, build_selector_tables(rep, weights), chain, n);
}

MultibasisResult select_multibasis(const ObservationRecord& record, std::span<const BasisCandidate> candidates,
                                   std::size_t n)
{
    if (candidates.empty())
        throw std::invalid_argument("select_multibasis: no candidate chains");
    if (n == 0)
        throw std::invalid_argument("select_multibasis: n must be positive");
    std::vector<SelectionResult> per;
    per.reserve(candidates.size());
    double global_min = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        if (!c.chain || !c.rep || !c.weights)
            throw std::invalid_argument("select_multibasis: incomplete candidate '" + c.label + "'");
        per.push_back(select(record, *c.chain, *c.rep, *c.weights, n));
        for (double v : per.back().crit_hat)
            global_min = std::min(global_min, v);
    }
    const double bound = global_min + 1.0 / static_cast<double>(n);
    for (std::size_t l = 0; l < per.size(); ++l) {
        auto& sel = per[l];
        for (std::size_t m = 0; m < sel.crit_hat.size(); ++m) {
            if (sel.crit_hat[m] <= bound) {
                sel.position = m;
                sel.m_hat = candidates[l].chain->label(m);
                sel.estimate = sel.estimates[m];
                return {l, candidates[l].label, std::move(sel)};
            }
        }
    }
    throw std::logic_error("select_multibasis: no model attains the minimum");
}

void write_selection_header(std::ostream& out, const ModelChain& chain)
{
    out << "replicate,m_hat,estimate";
    for (std::size_t pos = 0; pos < chain.size(); ++pos)
        out << ",crit_" << chain.label(pos);
    out << '\n';
}

void write_selection_row(std::ostream& out, std::uint64_t replicate, const SelectionResult& result)
{
    out << replicate << ',' << result.m_hat << ',';
    write_number(out, result.estimate);
    for (double v : result.crit_hat) {
        out << ',';
        write_number(out, v);
    }
    out << '\n';
}

} // namespace lifsel
