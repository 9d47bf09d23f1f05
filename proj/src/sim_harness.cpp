#include "irsbf/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

#include "irsbf/channel_model.hpp"
#include "irsbf/errors.hpp"
#include "irsbf/rate_core.hpp"
#include "irsbf/rng.hpp"

namespace irsbf {

namespace {

DesignProblem make_problem(ChannelEstimate estimate, double sigma_g_sq, const SystemConfig& config) {
    DesignProblem p;
    p.estimate = std::move(estimate);
    p.sigma_g_sq = sigma_g_sq;
    p.noise_var = config.noise_var;
    p.power_budget = config.transmit_power();
    p.weights = config.weight_vector();
    return p;
}

double scored_rate(const ChannelEstimate& channels, const BeamformingSolution& sol, double sigma_g_sq,
                   const SystemConfig& config) {
    const CMatrix g = effective_channels(channels, sol.phases);
    return weighted_sum_rate(achievable_rates(g, sol.precoder, sigma_g_sq, config.noise_var),
                             config.weight_vector());
}

}  // namespace

std::vector<SchemeOutcome> run_trial(const Scenario& scenario, double sweep_value, std::uint64_t trial_index) {
    const SystemConfig config = scenario.config_at(sweep_value);
    Rng rng = trial_stream(scenario.master_seed, sweep_value, trial_index);
    std::vector<SchemeOutcome> outcomes;
    auto fail = [](Scheme scheme, const char* what) {
        SchemeOutcome out;
        out.scheme = scheme;
        out.failed = true;
        out.error = what;
        out.sum_rate = std::nan("");
        out.genie_sum_rate = std::nan("");
        return out;
    };

    ChannelSet truth;
    ChannelEstimate estimate;
    try {
        // geometric draws can land below the error variance
        std::tie(truth, estimate) = sample_channel_pair(config, rng);
    } catch (const std::exception& e) {
        for (Scheme scheme : scenario.schemes) outcomes.push_back(fail(scheme, e.what()));
        return outcomes;
    }
    const CRowVector phases0 = random_unit_modulus(config.n_elements, rng);
    const ChannelEstimate exact = exact_estimate(truth);
    const double true_sigma_g_sq = estimate.sigma_g_sq;

    for (Scheme scheme : scenario.schemes) {
        SchemeOutcome out;
        out.scheme = scheme;
        try {
            const bool on_truth = scheme == Scheme::perfect_csi;
            const double design_sigma = scheme == Scheme::robust ? true_sigma_g_sq : 0.0;
            const DesignProblem problem = make_problem(on_truth ? exact : estimate, design_sigma, config);
            // every scheme sees the same fallback stream
            Rng init_rng = rng;
            const InitialPoint init = matched_filter_init(problem, phases0, init_rng);
            const SolveResult result = solve(problem, scenario.solver_options, init);

            const double score_sigma = on_truth ? 0.0 : true_sigma_g_sq;
            out.sum_rate = scored_rate(problem.estimate, result.solution, score_sigma, config);
            out.genie_sum_rate = scored_rate(exact, result.solution, 0.0, config);
            out.outer_iters = result.report.outer_iters;
            out.final_violation = result.report.final_violation;
            out.converged = result.report.converged;
            if (!std::isfinite(out.sum_rate) || !std::isfinite(out.genie_sum_rate))
                throw NumericalError("non-finite sum rate", result.report.outer_iters);
        } catch (const std::exception& e) {
            out = fail(scheme, e.what());
        }
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

const PointSummary& MonteCarloResult::summary(double sweep_value, Scheme scheme) const {
    for (const auto& s : summaries)
        if (s.sweep_value == sweep_value && s.scheme == scheme) return s;
    throw std::out_of_range("no summary for requested sweep value and scheme");
}

PointSummary summarize(double sweep_value, Scheme scheme, const std::vector<TrialRecord>& records) {
    PointSummary s;
    s.sweep_value = sweep_value;
    s.scheme = scheme;
    std::vector<const SchemeOutcome*> ok;
    for (const auto& r : records) {
        if (r.sweep_value != sweep_value || r.scheme != scheme) continue;
        if (r.outcome.failed) ++s.trials_failed;
        else ok.push_back(&r.outcome);
    }
    s.trials_ok = static_cast<int>(ok.size());
    if (ok.empty()) {
        s.mean = s.std = s.ci95 = s.min = s.max = std::nan("");
        return s;
    }
    const double n = static_cast<double>(ok.size());
    double sum = 0.0, iters = 0.0, viol = 0.0, conv = 0.0;
    s.min = s.max = ok.front()->sum_rate;
    for (const auto* o : ok) {
        sum += o->sum_rate;
        iters += o->outer_iters;
        viol += o->final_violation;
        conv += o->converged ? 1.0 : 0.0;
        s.min = std::min(s.min, o->sum_rate);
        s.max = std::max(s.max, o->sum_rate);
    }
    s.mean = sum / n;
    double sq = 0.0;
    for (const auto* o : ok) sq += (o->sum_rate - s.mean) * (o->sum_rate - s.mean);
    s.std = ok.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
    s.ci95 = 1.96 * s.std / std::sqrt(n);
    // keep the mean inside [min, max] despite rounding
    s.mean = std::clamp(s.mean, s.min, s.max);
    s.mean_outer_iters = iters / n;
    s.mean_final_violation = viol / n;
    s.converged_fraction = conv / n;
    return s;
}

MonteCarloResult run_scenario(const Scenario& scenario, int threads) {
    scenario.validate_unordered();
    if (threads < 1) throw ConfigError("thread count must be >= 1");

    MonteCarloResult result;
    result.sweep_param = scenario.sweep.param;
    result.sweep_values = scenario.sweep.values;
    std::sort(result.sweep_values.begin(), result.sweep_values.end());
    result.schemes = scenario.schemes;
    std::sort(result.schemes.begin(), result.schemes.end());
    result.trials = scenario.trials;
    result.master_seed = scenario.master_seed;

    const std::size_t n_values = result.sweep_values.size();
    const std::size_t n_trials = static_cast<std::size_t>(scenario.trials);
    const std::size_t n_tasks = n_values * n_trials;
    std::vector<std::vector<SchemeOutcome>> outcomes(n_tasks);

    Scenario ordered = scenario;
    ordered.schemes = result.schemes;

    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    auto worker = [&] {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            try {
                outcomes[task] = run_trial(ordered, result.sweep_values[task / n_trials], task % n_trials);
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
            }
        }
    };
    const int n_workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n_tasks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    }
    if (fatal) std::rethrow_exception(fatal);

    for (std::size_t vi = 0; vi < n_values; ++vi) {
        for (std::size_t si = 0; si < result.schemes.size(); ++si) {
            for (std::size_t t = 0; t < n_trials; ++t) {
                TrialRecord r;
                r.sweep_value = result.sweep_values[vi];
                r.scheme = result.schemes[si];
                r.trial = static_cast<int>(t);
                r.outcome = outcomes[vi * n_trials + t][si];
                result.records.push_back(std::move(r));
            }
        }
    }

    for (double value : result.sweep_values) {
        for (Scheme scheme : result.schemes) {
            PointSummary s = summarize(value, scheme, result.records);
            const double failed_fraction =
                static_cast<double>(s.trials_failed) / static_cast<double>(s.trials_ok + s.trials_failed);
            if (failed_fraction > kMaxFailedFraction) {
                throw ScenarioError(std::to_string(s.trials_failed) + " of " + std::to_string(scenario.trials) +
                                    " trials failed for scheme " + std::string(to_string(scheme)) + " at " +
                                    std::string(to_string(result.sweep_param)) + " = " + std::to_string(value));
            }
            result.summaries.push_back(s);
        }
    }
    return result;
}

}  // namespace irsbf
