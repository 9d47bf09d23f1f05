#include "irsbf/bench.hpp"

#include <algorithm>
#include <chrono>

#include "irsbf/channel_model.hpp"
#include "irsbf/errors.hpp"
#include "irsbf/rng.hpp"
#include "irsbf/scenario.hpp"

namespace irsbf {

using nlohmann::json;

void BenchConfig::validate() const {
    if (n_tx_values.empty() || m_values.empty()) throw ConfigError("bench: n_tx_values and m_values must be non-empty");
    for (int n : n_tx_values)
        if (n < 1) throw ConfigError("bench: n_tx values must be positive");
    for (int m : m_values)
        if (m < 1) throw ConfigError("bench: m values must be positive");
    if (n_users < 1) throw ConfigError("bench: n_users must be positive");
    if (sweeps < 20) throw ConfigError("bench: sweeps must be >= 20");
    if (warmup_sweeps < 0) throw ConfigError("bench: warmup_sweeps must be >= 0");
    if (!(err_var >= 0.0 && err_var < 1.0)) throw ConfigError("bench: err_var must lie in [0, 1)");
    solver_options.validate();
}

BenchConfig parse_bench_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("bench config: expected a JSON object");
    static const std::vector<std::string> known{"n_tx_values", "m_values", "n_users", "sweeps", "warmup_sweeps",
                                                "snr_db", "err_var", "seed", "solver_options"};
    for (const auto& item : doc.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("bench config: unknown key '" + item.key() + "'");
    BenchConfig c;
    try {
        if (doc.contains("n_tx_values")) c.n_tx_values = doc.at("n_tx_values").get<std::vector<int>>();
        if (doc.contains("m_values")) c.m_values = doc.at("m_values").get<std::vector<int>>();
        if (doc.contains("n_users")) c.n_users = doc.at("n_users").get<int>();
        if (doc.contains("sweeps")) c.sweeps = doc.at("sweeps").get<int>();
        if (doc.contains("warmup_sweeps")) c.warmup_sweeps = doc.at("warmup_sweeps").get<int>();
        if (doc.contains("snr_db")) c.snr_db = doc.at("snr_db").get<double>();
        if (doc.contains("err_var")) c.err_var = doc.at("err_var").get<double>();
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bench config: ") + e.what());
    }
    if (doc.contains("solver_options")) c.solver_options = parse_solver_options(doc.at("solver_options"));
    c.validate();
    return c;
}

BenchReport run_bench(const BenchConfig& config) {
    config.validate();
    BenchReport report;
    for (int n_tx : config.n_tx_values) {
        for (int m : config.m_values) {
            SystemConfig sys;
            sys.n_tx = n_tx;
            sys.n_users = config.n_users;
            sys.n_elements = m;
            sys.snr_db = config.snr_db;
            sys.err_var_bu = config.err_var;
            sys.err_var_iu = config.err_var;
            sys.validate();

            Rng rng = trial_stream(config.seed, static_cast<double>(m), static_cast<std::uint64_t>(n_tx));
            auto [truth, estimate] = sample_channel_pair(sys, rng);
            DesignProblem problem;
            problem.estimate = std::move(estimate);
            problem.sigma_g_sq = problem.estimate.sigma_g_sq;
            problem.noise_var = sys.noise_var;
            problem.power_budget = sys.transmit_power();
            problem.weights = sys.weight_vector();
            const InitialPoint init = matched_filter_init(problem, random_unit_modulus(m, rng), rng);
            SolverState state = make_initial_state(problem, init, initial_penalty(config.n_users, m, n_tx));

            for (int s = 0; s < config.warmup_sweeps; ++s) bsum_sweep(state, problem, config.solver_options);
            const auto start = std::chrono::steady_clock::now();
            for (int s = 0; s < config.sweeps; ++s) bsum_sweep(state, problem, config.solver_options);
            const double total_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            report.points.push_back({n_tx, config.n_users, m, config.sweeps, total_ms / config.sweeps});
        }
        const std::size_t base = report.points.size() - config.m_values.size();
        for (std::size_t i = 1; i < config.m_values.size(); ++i) {
            const BenchPoint& a = report.points[base + i - 1];
            const BenchPoint& b = report.points[base + i];
            if (b.n_elements != 2 * a.n_elements) continue;
            report.m_doubling_ratios.push_back({n_tx, a.n_elements, b.n_elements, b.mean_sweep_ms / a.mean_sweep_ms});
        }
    }
    return report;
}

json to_json(const BenchReport& report) {
    json points = json::array();
    for (const auto& p : report.points) {
        points.push_back({{"n_tx", p.n_tx},
                          {"n_users", p.n_users},
                          {"n_elements", p.n_elements},
                          {"sweeps", p.sweeps},
                          {"mean_sweep_ms", p.mean_sweep_ms}});
    }
    json ratios = json::array();
    for (const auto& r : report.m_doubling_ratios)
        ratios.push_back({{"n_tx", r.n_tx}, {"m_from", r.m_from}, {"m_to", r.m_to}, {"ratio", r.ratio}});
    return {{"points", points}, {"m_doubling_ratios", ratios}};
}

}  // namespace irsbf
