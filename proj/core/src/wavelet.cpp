#include "lifsel/wavelet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "lifsel/quadrature.hpp"

namespace lifsel {

namespace {

const std::array<double, 2> kHaar = {0.70710678118654752440, 0.70710678118654752440};

// Extremal-phase Daubechies filter with 10 vanishing moments.
const std::array<double, 20> kDaubechies20 = {
    0.026670057900555553587,    0.18817680007769148902,     0.52720118893172558648,
    0.68845903945360356574,     0.28117234366057746075,     -0.24984642432731537942,
    -0.1959462743773770435,     0.12736934033579326008,     0.09305736460357235116,
    -0.071394147166397087145,   -0.029457536821875812858,   0.03321267405934100174,
    0.0036065535669561696554,   -0.010733175483330575044,   0.0013953517470529011658,
    0.0019924052951850561172,   -0.00068585669495971162656, -0.00011646685512928545095,
    0.000093588670320069591334, -0.000013264202894521244812,
};

double level_scale(int m)
{
    return std::sqrt(std::ldexp(1.0, m));
}

void check_level(int m, std::size_t dimension)
{
    if (m < 0 || static_cast<std::size_t>(m) * dimension > 30)
        throw std::out_of_range("level " + std::to_string(m) + " out of range");
}

void check_unit(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("point " + std::to_string(x) + " lies outside [0, 1]");
}

} // namespace

BasisFamily BasisFamily::haar()
{
    return {BasisKind::Haar1D, 1, 14};
}

BasisFamily BasisFamily::daubechies20(int cascade_depth)
{
    BasisFamily b{BasisKind::Daubechies20, 1, cascade_depth};
    b.validate();
    return b;
}

BasisFamily BasisFamily::haar_multid(std::size_t dimension)
{
    BasisFamily b{BasisKind::HaarMultiD, dimension, 14};
    b.validate();
    return b;
}

void BasisFamily::validate() const
{
    if (dimension < 1)
        throw std::invalid_argument("basis: dimension must be positive");
    if (kind != BasisKind::HaarMultiD && dimension != 1)
        throw std::invalid_argument("basis: " + name() + " is one-dimensional");
    if (kind == BasisKind::Daubechies20 && (cascade_depth < 10 || cascade_depth > 20))
        throw std::invalid_argument("basis: d20 cascade_depth must lie in [10, 20]");
}

std::string BasisFamily::name() const
{
    switch (kind) {
    case BasisKind::Haar1D: return "haar";
    case BasisKind::Daubechies20: return "d20";
    case BasisKind::HaarMultiD: return "haar" + std::to_string(dimension) + "d";
    }
    return "?";
}

BasisFamily parse_basis(const std::string& name)
{
    if (name == "haar" || name == "H")
        return BasisFamily::haar();
    if (name == "d20" || name == "D20")
        return BasisFamily::daubechies20();
    if (name.size() > 5 && name.starts_with("haar") && name.back() == 'd') {
        std::size_t d = 0;
        auto digits = std::string_view(name).substr(4, name.size() - 5);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && d >= 1)
            return d == 1 ? BasisFamily::haar() : BasisFamily::haar_multid(d);
    }
    throw std::invalid_argument("unknown basis '" + name + "' (expected haar, d20 or haar<d>d)");
}

std::span<const double> haar_filter()
{
    return kHaar;
}

std::span<const double> daubechies20_filter()
{
    return kDaubechies20;
}

std::span<const double> basis_filter(BasisKind kind)
{
    return kind == BasisKind::Daubechies20 ? daubechies20_filter() : haar_filter();
}

CascadeTable::CascadeTable(std::span<const double> filter, int depth)
    : depth_(depth), support_(static_cast<double>(filter.size()) - 1.0), scale_(std::ldexp(1.0, depth))
{
    if (filter.size() < 2)
        throw std::invalid_argument("cascade: filter needs at least two taps");
    if (depth < 0 || depth > 22)
        throw std::invalid_argument("cascade: depth must lie in [0, 22]");
    const auto last = static_cast<std::ptrdiff_t>(filter.size()) - 1;
    const double root2 = std::sqrt(2.0);

    // Values at the integers: fixed point of phi(j) = sqrt2 sum_k h_k phi(2j - k),
    // normalized so that they sum to one.
    const Eigen::Index size = last + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        for (Eigen::Index i = 0; i < size; ++i) {
            const Eigen::Index k = 2 * j - i;
            if (k >= 0 && k <= last)
                a(j, i) = root2 * filter[static_cast<std::size_t>(k)];
        }
    }
    a -= Eigen::MatrixXd::Identity(size, size);
    a.row(size - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs(size - 1) = 1.0;
    Eigen::VectorXd integers = a.fullPivLu().solve(rhs);

    std::vector<double> prev(integers.data(), integers.data() + size);
    for (int d = 1; d <= depth; ++d) {
        const std::ptrdiff_t half = std::ptrdiff_t{1} << (d - 1);
        const std::ptrdiff_t count = last * (std::ptrdiff_t{1} << d) + 1;
        const auto prev_count = static_cast<std::ptrdiff_t>(prev.size());
        std::vector<double> next(static_cast<std::size_t>(count), 0.0);
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            double v = 0.0;
            for (std::ptrdiff_t k = 0; k <= last; ++k) {
                const std::ptrdiff_t idx = i - k * half;
                if (idx >= 0 && idx < prev_count)
                    v += filter[static_cast<std::size_t>(k)] * prev[static_cast<std::size_t>(idx)];
            }
            next[static_cast<std::size_t>(i)] = root2 * v;
        }
        prev = std::move(next);
    }
    values_ = std::move(prev);
}

double CascadeTable::operator()(double x) const noexcept
{
    if (!(x > 0.0 && x < support_))
        return 0.0;
    const double t = x * scale_;
    const double cell = std::floor(t);
    const auto i = static_cast<std::size_t>(cell);
    const double frac = t - cell;
    if (i + 1 >= values_.size())
        return values_.back();
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

void CascadeTable::write_csv(std::ostream& out) const
{
    out << "node,phi\n";
    char buf[64];
    for (std::size_t i = 0; i < values_.size(); ++i) {
        auto r1 = std::to_chars(buf, buf + sizeof buf, static_cast<double>(i) / scale_);
        out.write(buf, r1.ptr - buf);
        out << ',';
        auto r2 = std::to_chars(buf, buf + sizeof buf, values_[i]);
        out.write(buf, r2.ptr - buf);
        out << '\n';
    }
}

std::shared_ptr<const CascadeTable> daubechies20_cascade(int depth)
{
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const CascadeTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[depth];
    if (!slot)
        slot = std::make_shared<const CascadeTable>(daubechies20_filter(), depth);
    return slot;
}

std::int64_t haar_cell(double x, int m)
{
    check_level(m, 1);
    check_unit(x);
    const auto cells = std::int64_t{1} << m;
    auto k = static_cast<std::int64_t>(std::ceil(std::ldexp(x, m))) - 1;
    return std::clamp<std::int64_t>(k, 0, cells - 1);
}

std::vector<std::int64_t> multid_haar_cell(std::span<const double> x0, int m)
{
    std::vector<std::int64_t> k;
    k.reserve(x0.size());
    for (double x : x0)
        k.push_back(haar_cell(x, m));
    return k;
}

WaveletBasis::WaveletBasis(BasisFamily family) : family_(family)
{
    family_.validate();
    if (family_.kind == BasisKind::Daubechies20)
        cascade_ = daubechies20_cascade(family_.cascade_depth);
}

std::size_t WaveletBasis::size(int m) const
{
    check_level(m, family_.dimension);
    return std::size_t{1} << (static_cast<std::size_t>(m) * family_.dimension);
}

double WaveletBasis::scaling_eval(int m, std::int64_t k, double x) const
{
    return scaling_eval(m, k, std::span<const double>(&x, 1));
}

double WaveletBasis::scaling_eval(int m, std::int64_t k, std::span<const double> x) const
{
    const std::size_t count = size(m);
    if (k < 0 || static_cast<std::size_t>(k) >= count)
        throw std::out_of_range("translate " + std::to_string(k) + " outside [0, " + std::to_string(count) +
                                ") at level " + std::to_string(m));
    if (x.size() != family_.dimension)
        throw std::invalid_argument("scaling_eval: point dimension does not match the basis");

    if (family_.kind == BasisKind::Daubechies20) {
        check_unit(x[0]);
        const double scale = std::ldexp(1.0, m);
        const double t0 = scale * x[0] - static_cast<double>(k);
        const double support = cascade_->support_length();
        const auto lo = static_cast<std::int64_t>(std::ceil(-t0 / scale));
        const auto hi = static_cast<std::int64_t>(std::floor((support - t0) / scale));
        double sum = 0.0;
        for (std::int64_t l = lo; l <= hi; ++l)
            sum += (*cascade_)(t0 + scale * static_cast<double>(l));
        return level_scale(m) * sum;
    }

    const std::int64_t mask = (std::int64_t{1} << m) - 1;
    std::int64_t rest = k;
    for (double xi : x) {
        if (haar_cell(xi, m) != (rest & mask))
            return 0.0;
        rest >>= m;
    }
    return std::pow(level_scale(m), static_cast<double>(x.size()));
}

double scaling_eval(const BasisFamily& basis, int m, std::int64_t k, double x)
{
    if (basis.kind == BasisKind::Daubechies20)
        return WaveletBasis(basis).scaling_eval(m, k, x);
    if (basis.dimension != 1)
        throw std::invalid_argument("scaling_eval: scalar point given for a multivariate basis");
    check_level(m, 1);
    if (k < 0 || k >= (std::int64_t{1} << m))
        throw std::out_of_range("translate " + std::to_string(k) + " out of range at level " + std::to_string(m));
    return haar_cell(x, m) == k ? level_scale(m) : 0.0;
}

double IndicatorModel::eval(double x) const noexcept
{
    const bool inside = (x > a && x <= b) || (x == a && a == 0.0);
    return inside ? 1.0 / std::sqrt(length()) : 0.0;
}

double IndicatorModel::overlap(double lo, double hi) const noexcept
{
    return std::max(0.0, std::min(hi, b) - std::max(lo, a));
}

ModelChain::ModelChain(BasisFamily basis, std::vector<int> levels, std::optional<IndicatorModel> extra_model)
    : basis_(basis), levels_(std::move(levels)), extra_(extra_model)
{
    if (levels_.empty())
        throw std::invalid_argument("model chain: at least one level is required");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        check_level(levels_[i], basis.dimension);
        if (i > 0 && levels_[i] <= levels_[i - 1])
            throw std::invalid_argument("model chain: levels must be strictly increasing");
    }
    if (extra_) {
        if (basis.dimension != 1)
            throw std::invalid_argument("model chain: the indicator model is one-dimensional");
        if (!(extra_->a >= 0.0 && extra_->b <= 1.0 && extra_->length() > 0.0))
            throw std::invalid_argument("model chain: indicator interval must be a nonempty subset of [0, 1]");
    }
}

ModelChain ModelChain::dyadic(BasisFamily basis, int first, int last)
{
    if (first < 0 || last < first)
        throw std::invalid_argument("model chain: need 0 <= first <= last");
    std::vector<int> levels;
    for (int m = first; m <= last; ++m)
        levels.push_back(m);
    return ModelChain(basis, std::move(levels));
}

ModelChain ModelChain::with_indicator(double a, double b)
{
    const double h = b - a;
    if (!(h > 0.0 && h <= 1.0) || a < 0.0 || b > 1.0)
        throw std::invalid_argument("indicator interval length must lie in (0, 1] inside [0, 1]");
    int top = 0;
    while (top < 30 && std::ldexp(h, top + 1) <= 1.0)
        ++top;
    return ModelChain(BasisFamily::haar(), [&] {
        std::vector<int> levels;
        for (int m = 0; m <= top; ++m)
            levels.push_back(m);
        return levels;
    }(), IndicatorModel{a, b});
}

void ModelChain::check_position(std::size_t pos) const
{
    if (pos >= size())
        throw std::out_of_range("model position " + std::to_string(pos) + " outside the chain");
}

bool ModelChain::is_extra(std::size_t pos) const
{
    check_position(pos);
    return pos == levels_.size();
}

int ModelChain::label(std::size_t pos) const
{
    check_position(pos);
    return pos < levels_.size() ? levels_[pos] : levels_.back() + 1;
}

std::size_t ModelChain::position_of(int label) const
{
    for (std::size_t pos = 0; pos < size(); ++pos) {
        if (this->label(pos) == label)
            return pos;
    }
    throw std::out_of_range("model " + std::to_string(label) + " is not in the chain");
}

std::size_t ModelChain::index_count(std::size_t pos) const
{
    return is_extra(pos) ? 1 : basis_.size(levels_[pos]);
}

std::vector<BasisIndex> ModelChain::index_set(std::size_t pos) const
{
    const std::size_t count = index_count(pos);
    std::vector<BasisIndex> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        out.push_back({label(pos), static_cast<std::int64_t>(k)});
    return out;
}

double ModelChain::basis_eval(std::size_t pos, std::int64_t k, double x) const
{
    return basis_eval(pos, k, std::span<const double>(&x, 1));
}

double ModelChain::basis_eval(std::size_t pos, std::int64_t k, std::span<const double> x) const
{
    if (is_extra(pos)) {
        if (k != 0)
            throw std::out_of_range("the indicator model has a single basis function");
        if (x.size() != 1)
            throw std::invalid_argument("indicator model is one-dimensional");
        return extra_->eval(x[0]);
    }
    return basis_.scaling_eval(levels_[pos], k, x);
}

std::vector<double> midpoint_inner_products(std::span<const double> g_grid, const ModelChain& chain,
                                            std::size_t pos)
{
    const std::size_t d = chain.basis().dimension();
    const int total_bits = dyadic_log2(g_grid.size());
    if (total_bits % static_cast<int>(d) != 0)
        throw std::invalid_argument("grid size does not match the basis dimension");
    const int q = total_bits / static_cast<int>(d);
    const double weight = 1.0 / static_cast<double>(g_grid.size());

    if (chain.is_extra(pos)) {
        const auto& ind = *chain.extra_model();
        const double h = 1.0 / static_cast<double>(g_grid.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < g_grid.size(); ++i)
            sum += g_grid[i] * ind.eval((static_cast<double>(i) + 0.5) * h);
        return {sum * weight};
    }

    const int m = chain.label(pos);
    if (m > q)
        throw std::invalid_argument("quadrature grid is coarser than level " + std::to_string(m));
    const std::size_t count = chain.index_count(pos);
    std::vector<double> c(count, 0.0);

    if (chain.family().kind == BasisKind::Daubechies20) {
        // phi_{m,k}(x) = phi_{m,0}(x - k 2^-m): one table, shifted.
        const std::size_t grid = g_grid.size();
        const std::size_t shift = std::size_t{1} << (q - m);
        const double h = 1.0 / static_cast<double>(grid);
        std::vector<std::pair<std::size_t, double>> support;
        for (std::size_t i = 0; i < grid; ++i) {
            double v = chain.basis().scaling_eval(m, 0, (static_cast<double>(i) + 0.5) * h);
            if (v != 0.0)
                support.emplace_back(i, v);
        }
        for (std::size_t k = 0; k < count; ++k) {
            double sum = 0.0;
            for (auto [i, v] : support)
                sum += v * g_grid[(i + k * shift) % grid];
            c[k] = sum * weight;
        }
        return c;
    }

    const double value = std::pow(level_scale(m), static_cast<double>(d));
    const std::size_t per_axis = std::size_t{1} << q;
    for (std::size_t p = 0; p < g_grid.size(); ++p) {
        std::size_t rest = p;
        std::size_t cell = 0;
        for (std::size_t a = 0; a < d; ++a) {
            cell |= ((rest % per_axis) >> (q - m)) << (static_cast<std::size_t>(m) * a);
            rest /= per_axis;
        }
        c[cell] += g_grid[p];
    }
    for (auto& v : c)
        v *= value * weight;
    return c;
}

double projection_norm_sq(std::span<const double> g_grid, const ModelChain& chain, int m)
{
    const auto c = midpoint_inner_products(g_grid, chain, chain.position_of(m));
    double sum = 0.0;
    for (double v : c)
        sum += v * v;
    return sum;
}

} // namespace lifsel
