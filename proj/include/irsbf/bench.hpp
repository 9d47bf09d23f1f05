#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "irsbf/pdd_solver.hpp"

namespace irsbf {

/// Per-sweep timing grid for the BSUM iteration.
struct BenchConfig {
    std::vector<int> n_tx_values{4};
    std::vector<int> m_values{64, 128, 256};
    int n_users = 2;
    int sweeps = 50;        // timed sweeps per point (>= 20)
    int warmup_sweeps = 3;
    double snr_db = 10.0;
    double err_var = 0.1;
    std::uint64_t seed = 1;
    SolverOptions solver_options;

    void validate() const;
};

struct BenchPoint {
    int n_tx = 0;
    int n_users = 0;
    int n_elements = 0;
    int sweeps = 0;
    double mean_sweep_ms = 0.0;
};

struct BenchRatio {
    int n_tx = 0;
    int m_from = 0;
    int m_to = 0;
    double ratio = 0.0;  // mean_sweep_ms(m_to) / mean_sweep_ms(m_from)
};

struct BenchReport {
    std::vector<BenchPoint> points;
    std::vector<BenchRatio> m_doubling_ratios;  // consecutive M values with m_to == 2 m_from
};

BenchConfig parse_bench_config(const nlohmann::json& doc);
BenchReport run_bench(const BenchConfig& config);
nlohmann::json to_json(const BenchReport& report);

}  // namespace irsbf
