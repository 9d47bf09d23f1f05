#pragma once

#include "irsbf/channel_model.hpp"
#include "irsbf/types.hpp"

namespace irsbf {

/// Receive scalars u and MSE weights w of the WMMSE reformulation.
struct WmmseMultipliers {
    CVector u;  // length K
    RVector w;  // length K, w_i >= 1 when computed optimally
};

/// Diagonal weighting matrices of the trace form, built from multipliers and user weights.
struct WeightedDiagonals {
    RVector a;  // alpha_i w_i
    RVector b;  // alpha_i w_i |u_i|^2
    CVector d;  // u_i
    double b_trace = 0.0;
};

WeightedDiagonals weighted_diagonals(const WmmseMultipliers& mult, const RVector& alpha);

/// All primal, dual and penalty variables of the PDD/BSUM iteration.
struct SolverState {
    CMatrix v;         // N_T x K precoder
    CMatrix v_bar;     // N_T x K feasible copy of v
    CMatrix x;         // K x K, consensus target V^H G^H
    CRowVector phases; // 1 x M
    CMatrix z_v;       // N_T x K
    CMatrix z_g;       // K x K
    double rho = 1.0;
    WmmseMultipliers multipliers;
};

/// What the solver optimizes against: channel knowledge at design time plus
/// the scalars of the weighted sum-rate problem.
struct DesignProblem {
    ChannelEstimate estimate;
    double sigma_g_sq = 0.0;
    double noise_var = 1.0;
    double power_budget = 1.0;
    RVector weights;

    int n_users() const { return estimate.n_users(); }
    int n_tx() const { return estimate.n_tx(); }
    int n_elements() const { return estimate.n_elements(); }
};

}  // namespace irsbf
