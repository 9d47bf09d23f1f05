#pragma once

#include <optional>
#include <vector>

#include "irsbf/rng.hpp"
#include "irsbf/solver_state.hpp"
#include "irsbf/types.hpp"

namespace irsbf {

struct SolverOptions {
    double inner_tol = 1e-4;    // relative merit change ending a BSUM phase
    int inner_max_sweeps = 100;
    double outer_tol = 1e-5;    // max-norm constraint violation
    int outer_max_iters = 200;
    double rho_decay = 0.7;
    /// Overrides 500K / (2KM + M^2 + K N_T) when set.
    std::optional<double> rho_init;
    /// eta_{k+1} = violation_shrink * violation_k; dual step if violation < eta.
    double violation_shrink = 0.9;
    int phase_cd_sweeps = 3;

    void validate() const;
};

struct BeamformingSolution {
    CMatrix precoder;   // N_T x K
    CRowVector phases;  // 1 x M
};

struct ConvergenceReport {
    int outer_iters = 0;
    int inner_sweeps_total = 0;
    double final_violation = 0.0;
    std::vector<double> objective_trace;     // merit after every BSUM sweep
    std::vector<int> inner_sweeps_per_outer; // splits objective_trace into fixed-(rho, Z) phases
    double wall_time_ms = 0.0;
    bool converged = false;
};

struct SolveResult {
    BeamformingSolution solution;
    ConvergenceReport report;
};

struct InitialPoint {
    CMatrix v;
    CRowVector phases;
};

struct PhaseQuadratic {
    CMatrix h;      // M x M Hermitian PSD
    CRowVector c;   // 1 x M
};

double initial_penalty(int n_users, int n_elements, int n_tx);

/// Equal-power matched filter to the effective channel at the given phases, on
/// the power boundary. Users with a zero channel get a random column instead.
InitialPoint matched_filter_init(const DesignProblem& problem, const CRowVector& phases, Rng& rng);

/// State with V-bar = V, X = V^H G^H, zero duals and optimal multipliers.
SolverState make_initial_state(const DesignProblem& problem, const InitialPoint& init, double rho);

/// Minimizer over V:
///   ((2 rho sigma_g^2 b + 1) I + G^H G) V = Vbar - rho Z_v + G^H X^H + rho G^H Z_g^H.
CMatrix update_precoder(const SolverState& state, const CMatrix& g_hat, const DesignProblem& problem);

/// Radial projection onto the Frobenius ball of radius `radius`.
CMatrix project_frobenius_ball(const CMatrix& point, double radius);

/// Vbar = projection of V + rho Z_v onto ||.||_F^2 <= P_T.
CMatrix update_precoder_copy(const SolverState& state, double power_budget);

/// X = (2 rho D A + V^H G^H - rho Z_g)(2 rho B + I)^{-1}; B is diagonal.
CMatrix update_aux(const SolverState& state, const CMatrix& g_hat, const DesignProblem& problem);

/// H and c such that the phase-dependent part of the AL objective is
/// f H f^H - 2 Re{c f^H} + const.
PhaseQuadratic build_phase_quadratic(const SolverState& state, const DesignProblem& problem);

/// f H f^H - 2 Re{c f^H}
double phase_objective(const CRowVector& phases, const PhaseQuadratic& q);

/// Exact minimization over the single coordinate k with the others fixed.
void update_phase_coordinate(CRowVector& phases, const PhaseQuadratic& q, Eigen::Index k);

/// `sweeps` cyclic passes of update_phase_coordinate over k = 0..M-1.
CRowVector update_phases(const CRowVector& phases, const PhaseQuadratic& q, int sweeps);

/// max(||V - Vbar||_inf, ||X - V^H G^H||_inf), entrywise moduli.
double constraint_violation(const SolverState& state, const CMatrix& g_hat);

/// One BSUM pass: multipliers, V, Vbar, X, then phases. Returns the post-sweep merit.
double bsum_sweep(SolverState& state, const DesignProblem& problem, const SolverOptions& options);

/// Rescaling that maps a problem onto unit transmit power and unit mean-square
/// effective channel entries. SINRs, and therefore rates, are unchanged.
struct ProblemScaling {
    double channel = 1.0;   // RMS entry of the effective channel at the initial phases
    double precoder = 1.0;  // sqrt(P_T)
};

ProblemScaling problem_scaling(const DesignProblem& problem, const CRowVector& phases);
DesignProblem normalize_problem(const DesignProblem& problem, const ProblemScaling& scaling);

/// PDD outer loop around bsum_sweep, run on the normalized problem. The
/// violation in the report and the outer stopping test use the caller's units. Returns Vbar (feasible) and the final phases.
SolveResult solve(const DesignProblem& problem, const SolverOptions& options, const InitialPoint& init);

}  // namespace irsbf
