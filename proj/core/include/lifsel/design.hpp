#pragma once

#include <Eigen/Core>
#include <span>
#include <variant>
#include <vector>

#include "lifsel/observation.hpp"
#include "lifsel/wavelet.hpp"

namespace lifsel {

//! The linear maps data -> (Y(phi_l))_l for every model of a chain under one
//! noise model. Each basis function phi_l is stored as a weight vector w_l
//! over the data entries with Y(phi_l) = <w_l, data>.
class CoefficientDesign {
public:
    CoefficientDesign(const ModelChain& chain, const NoiseModel& model);

    const NoiseModel& model() const noexcept { return model_; }
    std::size_t size() const noexcept { return parts_.size(); }
    std::size_t data_size() const noexcept { return data_size_; }
    std::size_t index_count(std::size_t pos) const;

    void coefficients(std::span<const double> data, std::size_t pos, std::span<double> out) const;
    std::vector<double> coefficients(std::span<const double> data, std::size_t pos) const;

    //! The data-domain vector v with <v, data> = sum_l c_l Y(phi_l).
    std::vector<double> combine(std::span<const double> c, std::size_t pos) const;

    //! Values on the grid i/n of sum_l c_l phi_l (regression only).
    std::vector<double> grid_fit(std::span<const double> coeffs, std::size_t pos) const;

private:
    // Haar-type model: every data entry lies in exactly one cell and carries
    // the same coordinate value.
    struct Blocks {
        std::vector<std::uint32_t> cell;
        std::size_t cells = 0;
        double coordinate = 0.0;
    };
    // Rows are basis functions, columns data entries; already includes the
    // 1/n factor of the regression inner product.
    struct Dense {
        Eigen::MatrixXd coords;
    };
    using Part = std::variant<Blocks, Dense>;

    static Part build(const ModelChain& chain, std::size_t pos, const NoiseModel& model);
    friend std::vector<double> empirical_coefficients(const ObservationRecord&, const ModelChain&, int);

    NoiseModel model_;
    std::size_t data_size_;
    std::vector<Part> parts_;
};

//! Y(phi_{m,k}) for every k in Lambda_m.
std::vector<double> empirical_coefficients(const ObservationRecord& record, const ModelChain& chain, int m);

} // namespace lifsel
