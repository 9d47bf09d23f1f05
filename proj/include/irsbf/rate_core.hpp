#pragma once

#include "irsbf/solver_state.hpp"
#include "irsbf/types.hpp"

namespace irsbf {

/// Per-user robust achievable rate in bits/s/Hz:
///   log2(1 + |g_i v_i|^2 / (sum_{k!=i} |g_i v_k|^2 + sigma_g^2 ||V||_F^2 + noise_var)).
/// g_hat is K x N_T (rows are users), v is N_T x K.
RVector achievable_rates(const CMatrix& g_hat, const CMatrix& v, double sigma_g_sq, double noise_var);

/// Same rate evaluated from the consensus variable, |x_ki| standing in for |g_i v_k|.
RVector rates_from_aux(const CMatrix& x, const CMatrix& v, double sigma_g_sq, double noise_var);

double weighted_sum_rate(const RVector& rates, const RVector& weights);

/// Closed-form u and w. The u denominator includes the desired term; the w
/// denominator excludes it.
WmmseMultipliers optimal_multipliers(const CMatrix& x, const CMatrix& v, double sigma_g_sq, double noise_var);

/// e_i = |1 - u_i^* x_ii|^2 + sum_{k!=i} |u_i^* x_ki|^2 + sigma_g^2 sum_k ||u_i^* v_k||^2 + noise_var |u_i|^2
RVector mse_terms(const WmmseMultipliers& mult, const CMatrix& x, const CMatrix& v, double sigma_g_sq,
                  double noise_var);

/// WMMSE lower bound on the rate in bits, log2(w) - (w e - 1)/ln 2.
/// Equals log2(w) - w e + 1 at w = 1/e, which is where the bound is tight.
double rate_surrogate(double w, double e);

/// (1/2rho)(||V - Vbar + rho Z_v||^2 + ||X - V^H G^H + rho Z_g||^2)
double penalty_term(const SolverState& state, const CMatrix& g_hat);

/// sum_i alpha_i w_i e_i + penalty, evaluated term by term.
double al_objective(const SolverState& state, const CMatrix& g_hat, const DesignProblem& problem);

/// The same objective assembled from the diagonal trace expression
///   Tr(XBX^H) - Tr(AXD^H) - Tr(AX^H D) + Tr(A) + sigma_g^2 b Tr(V^H V) + noise_var b + penalty.
double al_objective_trace_form(const SolverState& state, const CMatrix& g_hat, const DesignProblem& problem);

/// BSUM merit sum_i alpha_i (w_i e_i - ln w_i) + penalty. Differs from
/// al_objective only by a function of w, so the two agree on every block except
/// the multiplier update, which minimizes the merit but not al_objective.
double bsum_merit(const SolverState& state, const CMatrix& g_hat, const DesignProblem& problem);

}  // namespace irsbf
