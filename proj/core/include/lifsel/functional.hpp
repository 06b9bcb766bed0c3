#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "lifsel/design.hpp"
#include "lifsel/functional_spec.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/wavelet.hpp"

namespace lifsel {

enum class GramMode { Nested, GeneralGram };

//! definition-1 keeps the sigma^2/n factor in every variance; paper-4.2 drops
//! it for integral functionals, so that sigma_m^2 = ||pi_{S_m} g||^2.
enum class VarianceScale { DefinitionOne, Paper42 };

std::string_view to_string(VarianceScale scale);
VarianceScale parse_variance_scale(std::string_view text);

//! A linear functional seen through a model chain.
struct FunctionalRep {
    //! values[pos][k] = T(phi_k) for the basis of model pos.
    std::vector<std::vector<double>> values;
    //! Var T(s_hat_m).
    std::vector<double> sigma_sq;
    //! Var(T(s_hat_j) - T(s_hat_m)); symmetric, zero diagonal.
    Eigen::MatrixXd sigma_diff_sq;
    GramMode gram_mode = GramMode::Nested;
    //! Factor applied to sum_k T(phi_k)^2.
    double noise_unit = 0.0;
};

FunctionalRep build_functional_rep(const FunctionalSpec& spec, const ModelChain& chain, const NoiseModel& model,
                                   VarianceScale scale = VarianceScale::DefinitionOne);

//! noise_unit * v' G v with v = (+T on the first block, -T on the second).
//! gram is the Gram matrix of the concatenated basis [Lambda_m ; Lambda_j].
double sigma_diff_general(std::span<const double> values_m, std::span<const double> values_j,
                          const Eigen::MatrixXd& gram, double noise_unit);

//! Gram matrix of [Lambda_m ; Lambda_j] by midpoint quadrature (one-dimensional chains).
Eigen::MatrixXd union_gram(const ModelChain& chain, std::size_t pos_m, std::size_t pos_j,
                           int depth = 16);

struct ProjectionVariances {
    std::vector<double> sigma_sq;
    Eigen::MatrixXd sigma_diff_sq;
};

//! Variances for integral functionals from ||pi_{S_m} g||^2 (nested chains).
ProjectionVariances integral_sigma_from_projections(std::span<const double> g_grid, const ModelChain& chain,
                                                    const NoiseModel& model,
                                                    VarianceScale scale = VarianceScale::DefinitionOne);

//! T(s_hat_m) = sum_k Y(phi_k) T(phi_k).
double estimate_T(const ObservationRecord& record, const FunctionalRep& rep, const ModelChain& chain, int m);

//! T(s_hat_m) is linear in the data; this keeps one weight vector per model
//! so a replicate costs one matrix-vector product.
class EstimatorBank {
public:
    EstimatorBank(const FunctionalRep& rep, const CoefficientDesign& design);

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    double estimate(std::span<const double> data, std::size_t pos) const;
    void estimate_all(std::span<const double> data, std::span<double> out) const;
    std::vector<double> estimate_all(std::span<const double> data) const;

private:
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weights_;
};

} // namespace lifsel
