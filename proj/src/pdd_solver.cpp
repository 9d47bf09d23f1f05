#include "irsbf/pdd_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "irsbf/channel_model.hpp"
#include "irsbf/errors.hpp"
#include "irsbf/rate_core.hpp"

namespace irsbf {

namespace {

constexpr double kZeroNumerator = 1e-14;

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

void SolverOptions::validate() const {
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) throw ConfigError("solver tolerances must be > 0");
    if (inner_max_sweeps < 1 || outer_max_iters < 1) throw ConfigError("solver iteration limits must be >= 1");
    if (!(rho_decay > 0.0 && rho_decay < 1.0)) throw ConfigError("rho_decay must lie in (0, 1)");
    if (rho_init && !(*rho_init > 0.0)) throw ConfigError("rho_init must be > 0");
    if (!(violation_shrink > 0.0 && violation_shrink < 1.0))
        throw ConfigError("violation_shrink must lie in (0, 1)");
    if (phase_cd_sweeps < 1) throw ConfigError("phase_cd_sweeps must be >= 1");
}

double initial_penalty(int n_users, int n_elements, int n_tx) {
    const double k = n_users;
    const double m = n_elements;
    return 500.0 * k / (2.0 * k * m + m * m + k * n_tx);
}

InitialPoint matched_filter_init(const DesignProblem& problem, const CRowVector& phases, Rng& rng) {
    const CMatrix g_hat = effective_channels(problem.estimate, phases);
    const int k = problem.n_users();
    const double column_norm = std::sqrt(problem.power_budget / k);
    InitialPoint init{CMatrix(problem.n_tx(), k), phases};
    for (int i = 0; i < k; ++i) {
        CVector col = g_hat.row(i).adjoint();
        if (col.norm() == 0.0) col = sample_cn(problem.n_tx(), 1, 1.0, rng);
        init.v.col(i) = column_norm * col.normalized();
    }
    return init;
}

SolverState make_initial_state(const DesignProblem& problem, const InitialPoint& init, double rho) {
    const CMatrix g_hat = effective_channels(problem.estimate, init.phases);
    const int k = problem.n_users();
    SolverState s;
    s.v = init.v;
    s.v_bar = init.v;
    s.phases = init.phases;
    s.x = init.v.adjoint() * g_hat.adjoint();
    s.z_v = CMatrix::Zero(problem.n_tx(), k);
    s.z_g = CMatrix::Zero(k, k);
    s.rho = rho;
    s.multipliers = optimal_multipliers(s.x, s.v, problem.sigma_g_sq, problem.noise_var);
    return s;
}

CMatrix update_precoder(const SolverState& s, const CMatrix& g_hat, const DesignProblem& p) {
    const double b = weighted_diagonals(s.multipliers, p.weights).b_trace;
    const Eigen::Index n = g_hat.cols();
    CMatrix system = g_hat.adjoint() * g_hat;
    system.diagonal().array() += 2.0 * s.rho * p.sigma_g_sq * b + 1.0;
    const CMatrix rhs =
        s.v_bar - s.rho * s.z_v + g_hat.adjoint() * s.x.adjoint() + s.rho * g_hat.adjoint() * s.z_g.adjoint();
    Eigen::LLT<CMatrix> llt(system);
    if (llt.info() != Eigen::Success || n == 0)
        throw NumericalError("precoder system is not positive definite", 0);
    return llt.solve(rhs);
}

CMatrix project_frobenius_ball(const CMatrix& point, double radius) {
    const double norm = point.norm();
    if (norm <= radius) return point;
    return point * (radius / norm);
}

CMatrix update_precoder_copy(const SolverState& s, double power_budget) {
    if (!(power_budget > 0.0)) throw DomainError("power budget must be > 0");
    return project_frobenius_ball(s.v + s.rho * s.z_v, std::sqrt(power_budget));
}

CMatrix update_aux(const SolverState& s, const CMatrix& g_hat, const DesignProblem& p) {
    const WeightedDiagonals diag = weighted_diagonals(s.multipliers, p.weights);
    CMatrix numer = s.v.adjoint() * g_hat.adjoint() - s.rho * s.z_g;
    numer.diagonal() += 2.0 * s.rho * diag.d.cwiseProduct(diag.a.cast<Complex>());
    const RVector scale = (2.0 * s.rho * diag.b.array() + 1.0).inverse().matrix();
    return numer * scale.cast<Complex>().asDiagonal();
}

PhaseQuadratic build_phase_quadratic(const SolverState& s, const DesignProblem& p) {
    if (!(s.rho > 0.0)) throw DomainError("penalty parameter rho must be > 0");
    const ChannelEstimate& est = p.estimate;
    const Eigen::Index k = s.v.cols();
    const Eigen::Index m = est.g_bi.rows();

    // column (j, i) holds G_c^[j] v_i = g_iu_hat^[j]^T .* (G_bi v_i)
    const CMatrix bi_v = est.g_bi * s.v;          // M x K
    const CMatrix direct = est.g_bu_hat * s.v;    // (j, i) -> g_bu_hat^[j] v_i
    const CMatrix target = s.x + s.rho * s.z_g;   // (i, j)
    CMatrix reflected(m, k * k);
    CVector residual(k * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
            const Eigen::Index col = j * k + i;
            reflected.col(col) = est.g_iu_hat.row(j).transpose().cwiseProduct(bi_v.col(i));
            residual(col) = std::conj(target(i, j)) - direct(j, i);
        }
    }
    const double scale = 1.0 / (2.0 * s.rho);
    PhaseQuadratic q;
    q.c = scale * (reflected.conjugate() * residual).transpose();
    reflected *= std::sqrt(scale);
    q.h.resize(m, m);
    q.h.noalias() = reflected * reflected.adjoint();
    return q;
}

double phase_objective(const CRowVector& f, const PhaseQuadratic& q) {
    const Complex quad = (f * q.h * f.adjoint())(0, 0);
    const Complex lin = (q.c * f.adjoint())(0, 0);
    return quad.real() - 2.0 * lin.real();
}

void update_phase_coordinate(CRowVector& f, const PhaseQuadratic& q, Eigen::Index k) {
    // c_k - sum_{i != k} psi_i H_ik
    const Complex cross = (f * q.h.col(k)).value() - f(k) * q.h(k, k);
    const Complex numer = q.c(k) - cross;
    const double mag = std::abs(numer);
    if (mag < kZeroNumerator) return;
    f(k) = numer / mag;
}

CRowVector update_phases(const CRowVector& phases, const PhaseQuadratic& q, int sweeps) {
    CRowVector f = phases;
    for (int s = 0; s < sweeps; ++s)
        for (Eigen::Index k = 0; k < f.size(); ++k) update_phase_coordinate(f, q, k);
    return f;
}

double constraint_violation(const SolverState& s, const CMatrix& g_hat) {
    return std::max(max_abs(s.v - s.v_bar), max_abs(s.x - s.v.adjoint() * g_hat.adjoint()));
}

double bsum_sweep(SolverState& s, const DesignProblem& p, const SolverOptions& options) {
    CMatrix g_hat = effective_channels(p.estimate, s.phases);
    s.multipliers = optimal_multipliers(s.x, s.v, p.sigma_g_sq, p.noise_var);
    s.v = update_precoder(s, g_hat, p);
    s.v_bar = update_precoder_copy(s, p.power_budget);
    s.x = update_aux(s, g_hat, p);
    const PhaseQuadratic q = build_phase_quadratic(s, p);
    s.phases = update_phases(s.phases, q, options.phase_cd_sweeps);
    g_hat = effective_channels(p.estimate, s.phases);
    return bsum_merit(s, g_hat, p);
}

ProblemScaling problem_scaling(const DesignProblem& p, const CRowVector& phases) {
    const CMatrix g_hat = effective_channels(p.estimate, phases);
    const double mean_sq = g_hat.squaredNorm() / static_cast<double>(g_hat.size());
    ProblemScaling sc;
    sc.channel = mean_sq > 0.0 && std::isfinite(mean_sq) ? std::sqrt(mean_sq) : 1.0;
    sc.precoder = std::sqrt(p.power_budget);
    return sc;
}

DesignProblem normalize_problem(const DesignProblem& p, const ProblemScaling& sc) {
    DesignProblem n = p;
    const double inv = 1.0 / sc.channel;
    n.estimate.g_bu_hat *= inv;
    n.estimate.g_iu_hat *= inv;
    for (auto& c : n.estimate.cascaded_hat) c *= inv;
    n.estimate.sigma_g_sq = p.estimate.sigma_g_sq * inv * inv;
    n.sigma_g_sq = p.sigma_g_sq * inv * inv;
    n.noise_var = p.noise_var * inv * inv / p.power_budget;
    n.power_budget = 1.0;
    return n;
}

SolveResult solve(const DesignProblem& p, const SolverOptions& options, const InitialPoint& init) {
    const auto start = std::chrono::steady_clock::now();
    options.validate();
    if (init.v.rows() != p.n_tx() || init.v.cols() != p.n_users() || init.phases.size() != p.n_elements())
        throw ShapeError("solve: initial point dimensions do not match the problem");
    if (!(p.power_budget > 0.0)) throw DomainError("solve: power budget must be > 0");
    if (init.v.squaredNorm() > p.power_budget * (1.0 + 1e-9))
        throw DomainError("solve: initial precoder exceeds the power budget");
    if ((init.phases.cwiseAbs().array() - 1.0).abs().maxCoeff() > 1e-9)
        throw DomainError("solve: initial phases are not unit modulus");

    const ProblemScaling sc = problem_scaling(p, init.phases);
    const DesignProblem np = normalize_problem(p, sc);
    const InitialPoint ninit{init.v / sc.precoder, init.phases};

    const double rho0 = options.rho_init.value_or(initial_penalty(p.n_users(), p.n_elements(), p.n_tx()));
    SolverState s = make_initial_state(np, ninit, rho0);
    ConvergenceReport report;
    double eta = std::numeric_limits<double>::infinity();

    for (int outer = 1; outer <= options.outer_max_iters; ++outer) {
        double prev = bsum_merit(s, effective_channels(np.estimate, s.phases), np);
        int sweeps = 0;
        for (; sweeps < options.inner_max_sweeps;) {
            const double merit = bsum_sweep(s, np, options);
            ++sweeps;
            if (!std::isfinite(merit)) throw NumericalError("non-finite objective", outer);
            report.objective_trace.push_back(merit);
            const bool settled = std::abs(prev - merit) <= options.inner_tol * (1.0 + std::abs(prev));
            prev = merit;
            if (settled) break;
        }
        report.inner_sweeps_total += sweeps;
        report.inner_sweeps_per_outer.push_back(sweeps);
        report.outer_iters = outer;

        const CMatrix g_hat = effective_channels(np.estimate, s.phases);
        const CMatrix primal_residual = s.v - s.v_bar;
        const CMatrix consensus_residual = s.x - s.v.adjoint() * g_hat.adjoint();
        // measured in the caller's units
        const double violation = std::max(sc.precoder * max_abs(primal_residual),
                                          sc.precoder * sc.channel * max_abs(consensus_residual));
        report.final_violation = violation;
        if (!std::isfinite(violation)) throw NumericalError("non-finite constraint violation", outer);
        if (violation < options.outer_tol) {
            report.converged = true;
            break;
        }
        if (violation < eta) {
            s.z_v += primal_residual / s.rho;
            s.z_g += consensus_residual / s.rho;
        } else {
            s.rho *= options.rho_decay;
        }
        eta = options.violation_shrink * violation;
    }

    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return {BeamformingSolution{s.v_bar * sc.precoder, s.phases}, std::move(report)};
}

}  // namespace irsbf
