#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsbf/pdd_solver.hpp"
#include "irsbf/scenario.hpp"

namespace irsbf {

/// Outcome of one scheme on one channel realization.
struct SchemeOutcome {
    Scheme scheme = Scheme::robust;
    bool failed = false;
    std::string error;
    /// Weighted sum rate under the scheme's scoring channels (see run_trial).
    double sum_rate = 0.0;
    /// Weighted rate of the same design on the true channels, zero error variance.
    double genie_sum_rate = 0.0;
    int outer_iters = 0;
    double final_violation = 0.0;
    bool converged = false;

    bool operator==(const SchemeOutcome&) const = default;
};

/// One realization, every requested scheme.
///  robust:      designed on estimates with sigma_g^2, scored on estimates with sigma_g^2
///  non_robust:  designed on estimates with sigma_g^2 = 0, scored on estimates with the true sigma_g^2
///  perfect_csi: designed and scored on the true channels with sigma_g^2 = 0
/// All schemes start from the same random phase vector.
std::vector<SchemeOutcome> run_trial(const Scenario& scenario, double sweep_value, std::uint64_t trial_index);

struct TrialRecord {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::robust;
    int trial = 0;
    SchemeOutcome outcome;

    bool operator==(const TrialRecord&) const = default;
};

struct PointSummary {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::robust;
    int trials_ok = 0;
    int trials_failed = 0;
    double mean = 0.0;
    double std = 0.0;   // sample standard deviation (n - 1)
    double ci95 = 0.0;  // 1.96 * std / sqrt(n)
    double min = 0.0;
    double max = 0.0;
    double mean_outer_iters = 0.0;
    double mean_final_violation = 0.0;
    double converged_fraction = 0.0;

    bool operator==(const PointSummary&) const = default;
};

struct MonteCarloResult {
    SweepParam sweep_param = SweepParam::n_elements;
    std::vector<double> sweep_values;  // ascending
    std::vector<Scheme> schemes;       // enum order
    int trials = 0;
    std::uint64_t master_seed = 0;
    std::vector<TrialRecord> records;   // sorted by (sweep_value, scheme, trial)
    std::vector<PointSummary> summaries; // sorted by (sweep_value, scheme)

    const PointSummary& summary(double sweep_value, Scheme scheme) const;

    bool operator==(const MonteCarloResult&) const = default;
};

/// Summary statistics over the non-failed records of one (value, scheme) point.
PointSummary summarize(double sweep_value, Scheme scheme, const std::vector<TrialRecord>& records);

/// Runs trials x sweep values on up to `threads` worker threads. Output is
/// independent of the thread count. Throws ScenarioError if more than 20% of
/// the trials at any point fail.
MonteCarloResult run_scenario(const Scenario& scenario, int threads = 1);

/// Fraction of failed trials above which run_scenario gives up.
inline constexpr double kMaxFailedFraction = 0.2;

}  // namespace irsbf
