#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lifsel/functional.hpp"
#include "lifsel/functional_spec.hpp"
#include "lifsel/signal.hpp"
#include "lifsel/wavelet.hpp"

namespace lifsel {

//! P1: penalized pointwise selector. P2: Mallows C_p level. P3: universal
//! hard threshold. P4: empirical weighted mean.
enum class Procedure { P1, P2, P3, P4 };

std::string_view to_string(Procedure p);
Procedure parse_procedure(std::string_view text);

//! Experiment description. Text form (one "key = value" per line, '#'
//! comments, lists separated by commas):
//!
//!   signals = s1, s2, bump
//!   functionals = point(1/4), interval(0, 1/32), g1
//!   bases = haar, d20
//!   procedures = P1, P2, P3, P4
//!   n = 256
//!   sigma = 0.2
//!   replicates = 5000          (alias N)
//!   p = 1
//!   master_seed = 20080101
//!   sigma_scale = definition-1 (or paper-4.2)
//!   output_dir = out
//!   n_list = 256, 512, 1024    (rates only)
//!   keep_coarse_level = haar:1, d20:2
//!   cascade_depth = 14
//!
//!   [signal bump]
//!   dimension = 1
//!   truth_quadrature_depth = 16
//!   piece = (0, 1/2] 4*x
//!   piece = (1/2, 1] 4*(1-x)
//!   otherwise = 0
//!   (or: formula = abs(x - 1/2)^0.5)
struct ExperimentConfig {
    std::vector<std::string> signals;
    std::vector<FunctionalSpec> functionals;
    std::vector<BasisFamily> bases;
    std::vector<Procedure> procedures;
    std::size_t n = 256;
    double sigma = 0.2;
    std::size_t replicates = 5000;
    double p = 1.0;
    std::uint64_t master_seed = 1;
    VarianceScale sigma_scale = VarianceScale::DefinitionOne;
    std::filesystem::path output_dir = "out";
    std::vector<std::size_t> n_list;
    std::map<BasisKind, int> keep_coarse_level;
    std::map<std::string, Signal> custom_signals;

    void validate() const;
    bool has(Procedure p) const;
    Signal resolve_signal(const std::string& id) const;
    int coarse_level(BasisKind kind) const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace lifsel
