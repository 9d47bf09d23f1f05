#pragma once

#include <optional>
#include <span>
#include <vector>

#include "irsbf/rng.hpp"
#include "irsbf/types.hpp"

namespace irsbf {

enum class GainMode { normalized, geometric };

/// Node placement for geometric gain mode. Distances in metres; the BS sits at
/// the origin, the IRS on the x axis and users uniformly on an annulus.
struct Geometry {
    double irs_distance_m = 50.0;
    double user_ring_min_m = 20.0;
    double user_ring_max_m = 100.0;
    double shadowing_var_db = 8.0;  // variance of the real dB shadowing term
};

struct SystemConfig {
    int n_tx = 4;
    int n_users = 4;
    int n_elements = 20;
    /// Linear transmit power. Ignored when snr_db is set.
    double power_budget = 10.0;
    /// Transmit SNR 10*log10(P_T / noise_var).
    std::optional<double> snr_db;
    double noise_var = 1.0;
    double err_var_bu = 0.1;
    double err_var_iu = 0.1;
    std::vector<double> weights;  // empty means all ones

    GainMode gain_mode = GainMode::normalized;
    std::vector<double> beta_bu;  // per user; a single entry is broadcast
    std::vector<double> beta_iu;
    double beta_bi = 1.0;
    Geometry geometry;

    double transmit_power() const;
    double weight(int user) const;
    double user_beta_bu(int user) const;
    double user_beta_iu(int user) const;
    RVector weight_vector() const;

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

struct ChannelSet {
    CMatrix g_bi;  // M x N_T
    CMatrix g_bu;  // K x N_T
    CMatrix g_iu;  // K x M
};

struct ChannelEstimate {
    CMatrix g_bu_hat;                  // K x N_T
    CMatrix g_iu_hat;                  // K x M
    CMatrix g_bi;                      // M x N_T, known exactly
    std::vector<CMatrix> cascaded_hat; // K matrices, M x N_T: diag(g_iu_hat row i) * g_bi
    double sigma_g_sq = 0.0;

    int n_users() const { return static_cast<int>(g_bu_hat.rows()); }
    int n_tx() const { return static_cast<int>(g_bu_hat.cols()); }
    int n_elements() const { return static_cast<int>(g_bi.rows()); }
};

/// 10*log10(beta) = -127.8 - 27*log10(d_km) + shadow_db.
double pathloss_linear(double distance_km, double shadow_db);

/// sigma_BU^2 + sigma_IU^2 * beta_BI * M.
double effective_error_variance(double err_var_bu, double err_var_iu, double beta_bi, int m);

/// diag(g_iu_row) * g_bi for each user row.
std::vector<CMatrix> cascaded_channels(const CMatrix& g_iu, const CMatrix& g_bi);

/// Builds an estimate that equals the given channels (no error, sigma_g^2 = 0).
ChannelEstimate exact_estimate(const ChannelSet& channels);

/// One realization of true channels and their estimates. Estimates and errors
/// are drawn independently as CN(0, beta - sigma^2) and CN(0, sigma^2).
std::pair<ChannelSet, ChannelEstimate> sample_channel_pair(const SystemConfig& config, Rng& rng);

/// g_bu_hat_row + phases * cascaded_hat_i.
CRowVector effective_channel(const CRowVector& g_bu_hat_row, const CMatrix& cascaded_hat_i,
                             const CRowVector& phases);

/// Stacked K x N_T effective channel for a phase vector.
CMatrix effective_channels(const ChannelEstimate& estimate, const CRowVector& phases);

/// Effective error row g_bu_err + phases * diag(g_iu_err) * g_bi.
CRowVector effective_error(const CRowVector& g_bu_err, const CRowVector& g_iu_err,
                           const CMatrix& g_bi, const CRowVector& phases);

CMatrix sample_cn(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng);
CRowVector random_unit_modulus(int m, Rng& rng);

}  // namespace irsbf
