#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "lifsel/design.hpp"
#include "lifsel/functional.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/wavelet.hpp"

namespace lifsel {

enum class WeightProvenance { Simulation, Derivative, IntervalMean, Multivariate, UserSupplied };

//! Weights x_m (penalty) and x_{j,m} (pairwise deviation), indexed by chain
//! position. x_jm is symmetric with an exactly zero diagonal.
struct WeightSchedule {
    std::vector<double> x_m;
    Eigen::MatrixXd x_jm;
    WeightProvenance provenance = WeightProvenance::UserSupplied;
    double p = 1.0;
    int r = 0;
    std::size_t d = 1;

    static WeightSchedule user(std::vector<double> x_m, Eigen::MatrixXd x_jm);
    void validate() const;
};

//! x_m = (p/2) ln 2^m, x_jm = (p/2) ln(2^j - 2^m); p = 1 gives the L1 choice.
WeightSchedule default_weights_simulation(const ModelChain& chain, double p = 1.0);
//! x_m = (p/2) m (1+2r) ln 2, x_jm = (p/2) ln(2^{j(1+2r)} - 2^{m(1+2r)}).
WeightSchedule default_weights_derivative(const ModelChain& chain, double p, int r);
//! Haar levels 0..m_n plus the indicator model: x_m = pm/2,
//! x_indicator = (p/2) ln(1/H), x_jm = p max(j, m)/2.
WeightSchedule default_weights_interval_mean(const ModelChain& chain, double p);
//! x_m = (pd/2) ln 2^m, x_jm = (pd/2) ln 2^{max(j,m)}.
WeightSchedule default_weights_multivariate(const ModelChain& chain, double p, std::size_t d);

double penalty(double x_m, double sigma_m);
double deviation_bound(double x_jm, double sigma_jm);

//! crit[m] = max_{j >= m} (|est[m] - est[j]| - H(j, m)) + pen[m].
std::vector<double> crit_hat(std::span<const double> estimates, const Eigen::MatrixXd& H, std::span<const double> pen);

//! Smallest index with crit <= min(crit) + 1/n.
std::size_t select_m_hat(std::span<const double> crit, std::size_t n);

//! pen and H for one (functional, chain, weights) triple; reusable across
//! replicates.
struct SelectorTables {
    std::vector<double> pen;
    Eigen::MatrixXd H;
};

SelectorTables build_selector_tables(const FunctionalRep& rep, const WeightSchedule& weights);

struct SelectionResult {
    std::size_t position = 0;
    int m_hat = 0;
    std::vector<double> estimates;
    std::vector<double> crit_hat;
    std::vector<double> pen;
    std::vector<double> sup_deviation;
    double estimate = 0.0;
};

//! Selection from precomputed estimates T(s_hat_m).
SelectionResult select_from_estimates(std::span<const double> estimates, const SelectorTables& tables,
                                      const ModelChain& chain, std::size_t n);

SelectionResult select(const ObservationRecord& record, const ModelChain& chain, const FunctionalRep& rep,
                       const WeightSchedule& weights, std::size_t n);

struct BasisCandidate {
    std::string label;
    const ModelChain* chain = nullptr;
    const FunctionalRep* rep = nullptr;
    const WeightSchedule* weights = nullptr;
};

struct MultibasisResult {
    std::size_t candidate = 0;
    std::string label;
    SelectionResult selection;
};

//! Smallest (candidate, model) in lexicographic order whose criterion is
//! within 1/n of the minimum over all candidates.
MultibasisResult select_multibasis(const ObservationRecord& record, std::span<const BasisCandidate> candidates,
                                   std::size_t n);

//! One CSV row per selection: replicate,m_hat,estimate,crit_<label>...
void write_selection_header(std::ostream& out, const ModelChain& chain);
void write_selection_row(std::ostream& out, std::uint64_t replicate, const SelectionResult& result);

} // namespace lifsel
