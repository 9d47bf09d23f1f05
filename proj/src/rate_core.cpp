#include "irsbf/rate_core.hpp"

#include <cmath>
#include <numbers>

#include "irsbf/errors.hpp"

namespace irsbf {

namespace {

void check_square_aux(const CMatrix& x, const CMatrix& v) {
    if (x.rows() != x.cols() || x.cols() != v.cols())
        throw ShapeError("aux matrix must be K x K with K = number of precoder columns");
}

}  // namespace

WeightedDiagonals weighted_diagonals(const WmmseMultipliers& mult, const RVector& alpha) {
    WeightedDiagonals out;
    out.a = alpha.cwiseProduct(mult.w);
    out.b = out.a.cwiseProduct(mult.u.cwiseAbs2());
    out.d = mult.u;
    out.b_trace = out.b.sum();
    return out;
}

RVector rates_from_aux(const CMatrix& x, const CMatrix& v, double sigma_g_sq, double noise_var) {
    check_square_aux(x, v);
    const Eigen::Index k = x.cols();
    const double self_noise = sigma_g_sq * v.squaredNorm() + noise_var;
    RVector rates(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double signal = std::norm(x(i, i));
        const double interference = x.col(i).squaredNorm() - signal;
        rates(i) = std::log2(1.0 + signal / (interference + self_noise));
    }
    return rates;
}

RVector achievable_rates(const CMatrix& g_hat, const CMatrix& v, double sigma_g_sq, double noise_var) {
    if (g_hat.cols() != v.rows() || g_hat.rows() != v.cols())
        throw ShapeError("achievable_rates: expected g_hat K x N_T and v N_T x K");
    // (V^H G^H)_{ki} = conj(g_i v_k)
    return rates_from_aux(v.adjoint() * g_hat.adjoint(), v, sigma_g_sq, noise_var);
}

double weighted_sum_rate(const RVector& rates, const RVector& weights) {
    if (rates.size() != weights.size()) throw ShapeError("weighted_sum_rate: size mismatch");
    return rates.dot(weights);
}

WmmseMultipliers optimal_multipliers(const CMatrix& x, const CMatrix& v, double sigma_g_sq, double noise_var) {
    check_square_aux(x, v);
    const Eigen::Index k = x.cols();
    const double self_noise = sigma_g_sq * v.squaredNorm() + noise_var;
    WmmseMultipliers mult{CVector(k), RVector(k)};
    for (Eigen::Index i = 0; i < k; ++i) {
        const double total = x.col(i).squaredNorm();
        const double signal = std::norm(x(i, i));
        mult.u(i) = x(i, i) / (total + self_noise);
        mult.w(i) = 1.0 + signal / (total - signal + self_noise);
    }
    return mult;
}

RVector mse_terms(const WmmseMultipliers& mult, const CMatrix& x, const CMatrix& v, double sigma_g_sq,
                  double noise_var) {
    check_square_aux(x, v);
    const Eigen::Index k = x.cols();
    if (mult.u.size() != k) throw ShapeError("mse_terms: multiplier length != K");
    const double power = v.squaredNorm();
    RVector e(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Complex uc = std::conj(mult.u(i));
        const double u2 = std::norm(mult.u(i));
        double value = std::norm(1.0 - uc * x(i, i));
        for (Eigen::Index j = 0; j < k; ++j)
            if (j != i) value += std::norm(uc * x(j, i));
        value += sigma_g_sq * u2 * power + noise_var * u2;
        e(i) = value;
    }
    return e;
}

double rate_surrogate(double w, double e) { return std::log2(w) - (w * e - 1.0) / std::numbers::ln2; }

double penalty_term(const SolverState& s, const CMatrix& g_hat) {
    if (!(s.rho > 0.0)) throw DomainError("penalty parameter rho must be > 0");
    const double primal = (s.v - s.v_bar + s.rho * s.z_v).squaredNorm();
    const double consensus = (s.x - s.v.adjoint() * g_hat.adjoint() + s.rho * s.z_g).squaredNorm();
    return (primal + consensus) / (2.0 * s.rho);
}

double al_objective(const SolverState& s, const CMatrix& g_hat, const DesignProblem& p) {
    const double penalty = penalty_term(s, g_hat);
    const RVector e = mse_terms(s.multipliers, s.x, s.v, p.sigma_g_sq, p.noise_var);
    return p.weights.cwiseProduct(s.multipliers.w).dot(e) + penalty;
}

double al_objective_trace_form(const SolverState& s, const CMatrix& g_hat, const DesignProblem& p) {
    const double penalty = penalty_term(s, g_hat);
    const WeightedDiagonals diag = weighted_diagonals(s.multipliers, p.weights);
    const auto A = diag.a.cast<Complex>().asDiagonal();
    const auto B = diag.b.cast<Complex>().asDiagonal();
    const auto D = diag.d.asDiagonal();
    const CMatrix xbx = s.x * B * s.x.adjoint();
    const CMatrix axd = A * s.x * D.toDenseMatrix().adjoint();
    const CMatrix axhd = A * s.x.adjoint() * D;
    const double value = xbx.trace().real() - axd.trace().real() - axhd.trace().real() + diag.a.sum() +
                         p.sigma_g_sq * diag.b_trace * (s.v.adjoint() * s.v).trace().real() +
                         p.noise_var * diag.b_trace;
    return value + penalty;
}

double bsum_merit(const SolverState& s, const CMatrix& g_hat, const DesignProblem& p) {
    const RVector log_w = s.multipliers.w.array().log().matrix();
    return al_objective(s, g_hat, p) - p.weights.dot(log_w);
}

}  // namespace irsbf
