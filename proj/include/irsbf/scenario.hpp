#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "irsbf/channel_model.hpp"
#include "irsbf/pdd_solver.hpp"

namespace irsbf {

enum class Scheme { robust, non_robust, perfect_csi };
enum class SweepParam { n_elements, snr_db, err_var };

std::string_view to_string(Scheme scheme);
std::string_view to_string(SweepParam param);
Scheme parse_scheme(std::string_view name);
SweepParam parse_sweep_param(std::string_view name);

struct Sweep {
    SweepParam param = SweepParam::n_elements;
    std::vector<double> values;
};

struct Scenario {
    SystemConfig system;
    Sweep sweep;
    std::vector<Scheme> schemes;
    int trials = 100;
    std::uint64_t master_seed = 0;
    SolverOptions solver_options;

    /// System configuration with the swept parameter set to `value`.
    SystemConfig config_at(double value) const;

    /// Full invariant check, including strictly increasing sweep values.
    void validate() const;
    /// Same, but only requires sweep values to be distinct.
    void validate_unordered() const;
};

/// Strict parser: unknown keys, wrong types and missing required fields throw ConfigError.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& scenario);

SolverOptions parse_solver_options(const nlohmann::json& doc);
nlohmann::json to_json(const SolverOptions& options);

}  // namespace irsbf
