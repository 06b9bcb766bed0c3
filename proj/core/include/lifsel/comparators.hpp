#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lifsel/design.hpp"
#include "lifsel/functional_spec.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/wavelet.hpp"

namespace lifsel {

enum class ComparatorKind { P2MallowsCp, P3Threshold, P4Empirical };

struct ComparatorSpec {
    ComparatorKind kind = ComparatorKind::P2MallowsCp;
    BasisFamily basis = BasisFamily::haar();
    int keep_coarse_level = 1;

    //! keep_coarse_level must lie in [0, log2 n].
    void validate(std::size_t n) const;
};

//! Default coarse level kept unthresholded by P3 for a basis.
int default_keep_coarse_level(BasisKind kind);

struct MallowsFit {
    std::size_t position = 0;
    int level = 0;
    //! gamma_n(s_hat_m) + 2 |Lambda_m| sigma^2 / n per model.
    std::vector<double> criterion;
};

//! Global least-squares level choice with the Mallows C_p penalty; ties go
//! to the smallest level.
MallowsFit p2_select(std::span<const double> data, const ModelChain& chain, const CoefficientDesign& design);
int p2_select_level(const ObservationRecord& record, const ModelChain& chain);

//! sigma sqrt(2 ln n).
double universal_threshold(const NoiseModel& model);

//! Hard-thresholded reconstruction on the grid i/n: details with
//! |d| < threshold are zeroed, scaling coefficients at keep_coarse_level kept.
std::vector<double> p3_threshold_estimate(std::span<const double> data, const NoiseModel& model,
                                          const BasisFamily& basis, int keep_coarse_level,
                                          std::optional<double> threshold = std::nullopt);
std::vector<double> p3_threshold_estimate(const ObservationRecord& record, const BasisFamily& basis,
                                          int keep_coarse_level, std::optional<double> threshold = std::nullopt);

//! (1/n) sum_i y_i g(i/n).
double p4_empirical(const ObservationRecord& record, std::span<const double> g_grid);
double p4_empirical(std::span<const double> data, std::span<const double> g_grid);

//! g(i/n), i = 1..n.
std::vector<double> weight_grid(const FunctionalSpec& functional, std::size_t n);

//! T applied to a function known through its values on the grid i/n.
//! Points: Haar estimates are step functions on ((i-1)/n, i/n]; smooth bases
//! are interpolated linearly and periodically. Integrals: sum_i v_i times the
//! integral of g over ((i-1)/n, i/n].
class GridFunctional {
public:
    GridFunctional(const FunctionalSpec& functional, const BasisFamily& basis, std::size_t n);
    double operator()(std::span<const double> grid_values) const;

private:
    std::vector<std::pair<std::size_t, double>> weights_;
    std::size_t n_;
};

} // namespace lifsel
