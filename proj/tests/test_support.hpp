#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "irsbf/channel_model.hpp"
#include "irsbf/pdd_solver.hpp"
#include "irsbf/rate_core.hpp"
#include "irsbf/solver_state.hpp"

namespace irsbf::testing {

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = Complex(n(rng), n(rng));
    return m;
}

inline CRowVector random_phases(Eigen::Index m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(0.0, 2.0 * M_PI);
    CRowVector f(m);
    for (Eigen::Index k = 0; k < m; ++k) f(k) = std::polar(1.0, a(rng));
    return f;
}

/// Random design problem with an arbitrary channel estimate.
inline DesignProblem random_problem(int n_tx, int k, int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    DesignProblem p;
    p.estimate.g_bu_hat = random_matrix(k, n_tx, rng);
    p.estimate.g_iu_hat = random_matrix(k, m, rng);
    p.estimate.g_bi = random_matrix(m, n_tx, rng);
    p.estimate.cascaded_hat = cascaded_channels(p.estimate.g_iu_hat, p.estimate.g_bi);
    p.estimate.sigma_g_sq = u(rng);
    p.sigma_g_sq = p.estimate.sigma_g_sq;
    p.noise_var = u(rng);
    p.power_budget = 1.0 + 4.0 * u(rng);
    p.weights = RVector(k);
    for (int i = 0; i < k; ++i) p.weights(i) = u(rng);
    return p;
}

/// Random state: every block arbitrary (not at consensus), rho in [0.2, 2].
inline SolverState random_state(const DesignProblem& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    const int n = p.n_tx(), k = p.n_users(), m = p.n_elements();
    SolverState s;
    s.v = random_matrix(n, k, rng, 0.5);
    s.v_bar = project_frobenius_ball(random_matrix(n, k, rng, 0.5), std::sqrt(p.power_budget));
    s.x = random_matrix(k, k, rng);
    s.phases = random_phases(m, rng);
    s.z_v = random_matrix(n, k, rng, 0.3);
    s.z_g = random_matrix(k, k, rng, 0.3);
    s.rho = u(rng);
    s.multipliers.u = random_matrix(k, 1, rng, 0.5);
    s.multipliers.w = RVector(k);
    for (int i = 0; i < k; ++i) s.multipliers.w(i) = 1.0 + u(rng);
    return s;
}

/// Central-difference gradient of f with respect to the real and imaginary
/// part of every entry of `target`; returns the largest magnitude.
inline double max_fd_gradient(CMatrix& target, const std::function<double()>& f, double step = 1e-5) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < target.cols(); ++j) {
        for (Eigen::Index i = 0; i < target.rows(); ++i) {
            for (const Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
                const Complex orig = target(i, j);
                target(i, j) = orig + step * dir;
                const double up = f();
                target(i, j) = orig - step * dir;
                const double down = f();
                target(i, j) = orig;
                worst = std::max(worst, std::abs(up - down) / (2.0 * step));
            }
        }
    }
    return worst;
}

}  // namespace irsbf::testing
