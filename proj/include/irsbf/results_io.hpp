#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "irsbf/pdd_solver.hpp"
#include "irsbf/sim_harness.hpp"

namespace irsbf {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "sweep_param,sweep_value,scheme,trial,sum_rate_bps_hz,outer_iters,final_violation";

/// Per-trial rows, then mean/std/ci95 rows per (value, scheme). Numbers use 12 significant digits.
std::string to_csv(const MonteCarloResult& result);

/// Doubles are written with full round-trip precision; NaN becomes null.
nlohmann::json to_json(const MonteCarloResult& result);
MonteCarloResult monte_carlo_result_from_json(const nlohmann::json& doc);

void emit_results(const MonteCarloResult& result, OutputFormat format, const std::filesystem::path& path);

/// {outer_iters, inner_sweeps_total, final_violation, objective_trace, wall_time_ms}
nlohmann::json to_json(const ConvergenceReport& report);

/// printf("%.12g")
std::string format_number(double value);

}  // namespace irsbf
