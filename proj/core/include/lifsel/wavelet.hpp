#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lifsel {

enum class BasisKind { Haar1D, Daubechies20, HaarMultiD };

struct BasisFamily {
    BasisKind kind = BasisKind::Haar1D;
    std::size_t dimension = 1;
    int cascade_depth = 14;

    static BasisFamily haar();
    static BasisFamily daubechies20(int cascade_depth = 14);
    static BasisFamily haar_multid(std::size_t dimension);

    void validate() const;
    //! "haar", "d20" or "haar<d>d".
    std::string name() const;
    bool is_haar() const noexcept { return kind != BasisKind::Daubechies20; }

    friend bool operator==(const BasisFamily&, const BasisFamily&) = default;
};

//! Parses "haar", "d20", "haar2d", ...
BasisFamily parse_basis(const std::string& name);

//! Orthonormal low-pass filters (sum of taps = sqrt 2).
std::span<const double> haar_filter();
std::span<const double> daubechies20_filter();
std::span<const double> basis_filter(BasisKind kind);

//! Father wavelet of a compactly supported filter, tabulated on the dyadic
//! nodes i / 2^depth of its support [0, taps - 1] by the cascade algorithm.
class CascadeTable {
public:
    CascadeTable(std::span<const double> filter, int depth);

    //! Linear interpolation between nodes; 0 outside the support.
    double operator()(double x) const noexcept;

    int depth() const noexcept { return depth_; }
    double support_length() const noexcept { return support_; }
    std::span<const double> nodes() const noexcept { return values_; }

    //! Columns: node, phi.
    void write_csv(std::ostream& out) const;

private:
    int depth_;
    double support_;
    double scale_;
    std::vector<double> values_;
};

//! Shared, lazily built D20 cascade table for a given depth.
std::shared_ptr<const CascadeTable> daubechies20_cascade(int depth);

//! Haar cell of x at level m. Cells are (k/2^m, (k+1)/2^m], with x = 0
//! assigned to cell 0, so that the data point i/n sits in the block that
//! ends at i/n.
std::int64_t haar_cell(double x, int m);

//! Cell indices per axis of a point in [0,1]^d.
std::vector<std::int64_t> multid_haar_cell(std::span<const double> x0, int m);

//! Point evaluation of periodized scaling functions of one family.
class WaveletBasis {
public:
    explicit WaveletBasis(BasisFamily family);

    const BasisFamily& family() const noexcept { return family_; }
    std::size_t dimension() const noexcept { return family_.dimension; }
    //! |Lambda_m| = 2^{m d}.
    std::size_t size(int m) const;

    double scaling_eval(int m, std::int64_t k, double x) const;
    //! k is the flattened translate, first axis fastest.
    double scaling_eval(int m, std::int64_t k, std::span<const double> x) const;

    const CascadeTable* cascade() const noexcept { return cascade_.get(); }

private:
    BasisFamily family_;
    std::shared_ptr<const CascadeTable> cascade_;
};

double scaling_eval(const BasisFamily& basis, int m, std::int64_t k, double x);

//! One-dimensional model spanned by 1_[a,b] / sqrt(b - a).
struct IndicatorModel {
    double a = 0.0;
    double b = 1.0;

    double length() const noexcept { return b - a; }
    //! Uses the same right-closed convention as the Haar cells.
    double eval(double x) const noexcept;
    //! Length of [a, b] intersected with [lo, hi].
    double overlap(double lo, double hi) const noexcept;
};

struct BasisIndex {
    int level;
    std::int64_t translate;
};

//! Ordered list of linear models: nested multiresolution spaces S_m for the
//! listed levels, optionally followed by one indicator model.
class ModelChain {
public:
    ModelChain(BasisFamily basis, std::vector<int> levels,
               std::optional<IndicatorModel> extra_model = std::nullopt);

    static ModelChain dyadic(BasisFamily basis, int first, int last);
    //! Haar levels 0..m_n with m_n = sup{m : 2^m <= 1/H}, then 1_[a,b].
    static ModelChain with_indicator(double a, double b);

    const WaveletBasis& basis() const noexcept { return basis_; }
    const BasisFamily& family() const noexcept { return basis_.family(); }
    std::span<const int> levels() const noexcept { return levels_; }
    const std::optional<IndicatorModel>& extra_model() const noexcept { return extra_; }

    //! Number of models.
    std::size_t size() const noexcept { return levels_.size() + (extra_ ? 1 : 0); }
    bool is_extra(std::size_t pos) const;
    //! Level of a multiresolution model; the indicator model is labelled
    //! last level + 1.
    int label(std::size_t pos) const;
    std::size_t position_of(int label) const;
    std::size_t index_count(std::size_t pos) const;
    std::vector<BasisIndex> index_set(std::size_t pos) const;

    double basis_eval(std::size_t pos, std::int64_t k, double x) const;
    double basis_eval(std::size_t pos, std::int64_t k, std::span<const double> x) const;

private:
    void check_position(std::size_t pos) const;

    WaveletBasis basis_;
    std::vector<int> levels_;
    std::optional<IndicatorModel> extra_;
};

//! <g, phi_l> for every basis function of a model, g given on the midpoint
//! grid of depth log2(size) (per axis for multivariate Haar).
std::vector<double> midpoint_inner_products(std::span<const double> g_grid, const ModelChain& chain,
                                            std::size_t pos);

//! ||pi_{S_m} g||^2 by midpoint quadrature.
double projection_norm_sq(std::span<const double> g_grid, const ModelChain& chain, int m);

} // namespace lifsel
