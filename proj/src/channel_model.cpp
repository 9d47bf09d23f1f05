#include "irsbf/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "irsbf/errors.hpp"

namespace irsbf {

namespace {

double per_user(const std::vector<double>& values, int user) {
    if (values.empty()) return 1.0;
    if (values.size() == 1) return values.front();
    return values.at(static_cast<std::size_t>(user));
}

struct LinkGains {
    std::vector<double> bu;
    std::vector<double> iu;
    double bi;
};

LinkGains draw_geometric_gains(const SystemConfig& config, Rng& rng) {
    const Geometry& geo = config.geometry;
    std::normal_distribution<double> shadow(0.0, std::sqrt(geo.shadowing_var_db));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    LinkGains gains;
    gains.bi = pathloss_linear(geo.irs_distance_m / 1000.0, shadow(rng));
    for (int i = 0; i < config.n_users; ++i) {
        const double r = geo.user_ring_min_m + (geo.user_ring_max_m - geo.user_ring_min_m) * unit(rng);
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        const double ux = r * std::cos(theta);
        const double uy = r * std::sin(theta);
        const double d_iu = std::hypot(ux - geo.irs_distance_m, uy);
        gains.bu.push_back(pathloss_linear(r / 1000.0, shadow(rng)));
        // a user on top of the IRS would give an infinite gain
        gains.iu.push_back(pathloss_linear(std::max(d_iu, 1.0) / 1000.0, shadow(rng)));
    }
    return gains;
}

void check_split(double beta, double err_var, const char* link, int user) {
    if (err_var > beta) {
        throw ConfigError(std::string("error variance exceeds channel gain on ") + link + " link of user " +
                          std::to_string(user) + " (sigma^2 = " + std::to_string(err_var) +
                          " > beta = " + std::to_string(beta) + ")");
    }
}

}  // namespace

double SystemConfig::transmit_power() const {
    if (snr_db) return noise_var * std::pow(10.0, *snr_db / 10.0);
    return power_budget;
}

double SystemConfig::weight(int user) const { return per_user(weights, user); }
double SystemConfig::user_beta_bu(int user) const { return per_user(beta_bu, user); }
double SystemConfig::user_beta_iu(int user) const { return per_user(beta_iu, user); }

RVector SystemConfig::weight_vector() const {
    RVector w(n_users);
    for (int i = 0; i < n_users; ++i) w(i) = weight(i);
    return w;
}

void SystemConfig::validate() const {
    if (n_tx < 1) throw ConfigError("n_tx must be a positive integer");
    if (n_users < 1) throw ConfigError("n_users must be a positive integer");
    if (n_elements < 1) throw ConfigError("n_elements must be a positive integer");
    if (!(noise_var > 0.0)) throw ConfigError("noise_var must be > 0");
    if (!(transmit_power() > 0.0) || !std::isfinite(transmit_power()))
        throw ConfigError("power budget must be finite and > 0");
    if (!(err_var_bu >= 0.0) || !(err_var_iu >= 0.0)) throw ConfigError("error variances must be >= 0");

    if (!weights.empty() && weights.size() != 1 && weights.size() != static_cast<std::size_t>(n_users))
        throw ConfigError("weights must have one entry or n_users entries");
    bool any_positive = false;
    for (int i = 0; i < n_users; ++i) {
        const double a = weight(i);
        if (!(a >= 0.0)) throw ConfigError("weights must be nonnegative");
        any_positive = any_positive || a > 0.0;
    }
    if (!any_positive) throw ConfigError("weights must contain at least one positive entry");

    if (gain_mode == GainMode::normalized) {
        for (const auto* gains : {&beta_bu, &beta_iu}) {
            if (gains->size() > 1 && gains->size() != static_cast<std::size_t>(n_users))
                throw ConfigError("per-user gains must have one entry or n_users entries");
        }
        if (!(beta_bi > 0.0)) throw ConfigError("beta_bi must be > 0");
        for (int i = 0; i < n_users; ++i) {
            if (!(user_beta_bu(i) > 0.0) || !(user_beta_iu(i) > 0.0))
                throw ConfigError("channel gains must be > 0");
            check_split(user_beta_bu(i), err_var_bu, "BS-user", i);
            check_split(user_beta_iu(i), err_var_iu, "IRS-user", i);
        }
    } else {
        if (!(geometry.irs_distance_m > 0.0)) throw ConfigError("irs_distance_m must be > 0");
        if (!(geometry.user_ring_min_m > 0.0) || !(geometry.user_ring_max_m >= geometry.user_ring_min_m))
            throw ConfigError("user ring radii must satisfy 0 < min <= max");
        if (!(geometry.shadowing_var_db >= 0.0)) throw ConfigError("shadowing_var_db must be >= 0");
    }
}

double pathloss_linear(double distance_km, double shadow_db) {
    if (!(distance_km > 0.0)) throw DomainError("pathloss_linear: distance must be > 0");
    return std::pow(10.0, (-127.8 - 27.0 * std::log10(distance_km) + shadow_db) / 10.0);
}

double effective_error_variance(double err_var_bu, double err_var_iu, double beta_bi, int m) {
    return err_var_bu + err_var_iu * beta_bi * static_cast<double>(m);
}

CMatrix sample_cn(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng) {
    if (variance == 0.0) return CMatrix::Zero(rows, cols);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    CMatrix out(rows, cols);
    // column-major fill order is part of the determinism contract
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(r, c) = Complex(re, im);
        }
    return out;
}

CRowVector random_unit_modulus(int m, Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    CRowVector f(m);
    for (int k = 0; k < m; ++k) f(k) = std::polar(1.0, angle(rng));
    return f;
}

std::vector<CMatrix> cascaded_channels(const CMatrix& g_iu, const CMatrix& g_bi) {
    if (g_iu.cols() != g_bi.rows()) throw ShapeError("cascaded_channels: g_iu columns must equal g_bi rows");
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(g_iu.rows()));
    for (Eigen::Index i = 0; i < g_iu.rows(); ++i)
        out.emplace_back(g_iu.row(i).transpose().asDiagonal() * g_bi);
    return out;
}

ChannelEstimate exact_estimate(const ChannelSet& channels) {
    ChannelEstimate est;
    est.g_bu_hat = channels.g_bu;
    est.g_iu_hat = channels.g_iu;
    est.g_bi = channels.g_bi;
    est.cascaded_hat = cascaded_channels(channels.g_iu, channels.g_bi);
    est.sigma_g_sq = 0.0;
    return est;
}

std::pair<ChannelSet, ChannelEstimate> sample_channel_pair(const SystemConfig& config, Rng& rng) {
    const int k = config.n_users;
    const int n = config.n_tx;
    const int m = config.n_elements;

    LinkGains gains;
    if (config.gain_mode == GainMode::geometric) {
        gains = draw_geometric_gains(config, rng);
    } else {
        gains.bi = config.beta_bi;
        for (int i = 0; i < k; ++i) {
            gains.bu.push_back(config.user_beta_bu(i));
            gains.iu.push_back(config.user_beta_iu(i));
        }
    }
    for (int i = 0; i < k; ++i) {
        check_split(gains.bu[i], config.err_var_bu, "BS-user", i);
        check_split(gains.iu[i], config.err_var_iu, "IRS-user", i);
    }

    ChannelSet truth;
    ChannelEstimate est;
    est.g_bi = sample_cn(m, n, gains.bi, rng);
    truth.g_bi = est.g_bi;

    est.g_bu_hat.resize(k, n);
    est.g_iu_hat.resize(k, m);
    truth.g_bu.resize(k, n);
    truth.g_iu.resize(k, m);
    for (int i = 0; i < k; ++i) {
        est.g_bu_hat.row(i) = sample_cn(1, n, gains.bu[i] - config.err_var_bu, rng);
        est.g_iu_hat.row(i) = sample_cn(1, m, gains.iu[i] - config.err_var_iu, rng);
    }
    const CMatrix err_bu = sample_cn(k, n, config.err_var_bu, rng);
    const CMatrix err_iu = sample_cn(k, m, config.err_var_iu, rng);
    truth.g_bu = est.g_bu_hat + err_bu;
    truth.g_iu = est.g_iu_hat + err_iu;

    est.cascaded_hat = cascaded_channels(est.g_iu_hat, est.g_bi);
    est.sigma_g_sq = effective_error_variance(config.err_var_bu, config.err_var_iu, gains.bi, m);
    return {std::move(truth), std::move(est)};
}

CRowVector effective_channel(const CRowVector& g_bu_hat_row, const CMatrix& cascaded_hat_i,
                             const CRowVector& phases) {
    if (cascaded_hat_i.rows() != phases.size() || cascaded_hat_i.cols() != g_bu_hat_row.size())
        throw ShapeError("effective_channel: expected phases 1xM, cascaded MxN_T, direct 1xN_T");
    return g_bu_hat_row + phases * cascaded_hat_i;
}

CMatrix effective_channels(const ChannelEstimate& estimate, const CRowVector& phases) {
    if (phases.size() != estimate.g_bi.rows()) throw ShapeError("effective_channels: phase vector length != M");
    // rows of (G_iu * diag(f)) * G_bi are f * diag(g_iu row) * G_bi
    return estimate.g_bu_hat + (estimate.g_iu_hat * phases.transpose().asDiagonal()) * estimate.g_bi;
}

CRowVector effective_error(const CRowVector& g_bu_err, const CRowVector& g_iu_err, const CMatrix& g_bi,
                           const CRowVector& phases) {
    return g_bu_err + phases.cwiseProduct(g_iu_err) * g_bi;
}

}  // namespace irsbf
