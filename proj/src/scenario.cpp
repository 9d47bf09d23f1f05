#include "irsbf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "irsbf/errors.hpp"

namespace irsbf {

using nlohmann::json;

namespace {

void require_object(const json& doc, std::string_view where) {
    if (!doc.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
}

void reject_unknown_keys(const json& doc, std::string_view where, std::initializer_list<std::string_view> known) {
    for (const auto& item : doc.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
}

template <class T>
T get_field(const json& doc, std::string_view where, const std::string& key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

template <class T>
void read_optional(const json& doc, std::string_view where, const std::string& key, T& out) {
    if (doc.contains(key)) out = get_field<T>(doc, where, key);
}

int get_int(const json& doc, std::string_view where, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string(where) + "." + key + ": expected an integer");
    return v.get<int>();
}

std::vector<double> number_or_array(const json& doc, std::string_view where, const std::string& key) {
    const json& v = doc.at(key);
    if (v.is_number()) return {v.get<double>()};
    return get_field<std::vector<double>>(doc, where, key);
}

SystemConfig parse_system(const json& doc) {
    constexpr std::string_view where = "system";
    require_object(doc, where);
    reject_unknown_keys(doc, where,
                        {"n_tx", "n_users", "n_elements", "power_budget", "snr_db", "noise_var", "err_var_bu",
                         "err_var_iu", "weights", "gain_mode", "beta_bu", "beta_iu", "beta_bi", "geometry"});
    SystemConfig c;
    c.n_tx = get_int(doc, where, "n_tx");
    c.n_users = get_int(doc, where, "n_users");
    if (doc.contains("n_elements")) c.n_elements = get_int(doc, where, "n_elements");
    if (doc.contains("power_budget") && doc.contains("snr_db"))
        throw ConfigError("system: give either power_budget or snr_db, not both");
    if (doc.contains("power_budget")) c.power_budget = get_field<double>(doc, where, "power_budget");
    if (doc.contains("snr_db")) c.snr_db = get_field<double>(doc, where, "snr_db");
    read_optional(doc, where, "noise_var", c.noise_var);
    read_optional(doc, where, "err_var_bu", c.err_var_bu);
    read_optional(doc, where, "err_var_iu", c.err_var_iu);
    if (doc.contains("weights")) c.weights = number_or_array(doc, where, "weights");
    if (doc.contains("gain_mode")) {
        const auto mode = get_field<std::string>(doc, where, "gain_mode");
        if (mode == "normalized") c.gain_mode = GainMode::normalized;
        else if (mode == "geometric") c.gain_mode = GainMode::geometric;
        else throw ConfigError("system.gain_mode: expected 'normalized' or 'geometric'");
    }
    if (doc.contains("beta_bu")) c.beta_bu = number_or_array(doc, where, "beta_bu");
    if (doc.contains("beta_iu")) c.beta_iu = number_or_array(doc, where, "beta_iu");
    read_optional(doc, where, "beta_bi", c.beta_bi);
    if (doc.contains("geometry")) {
        const json& g = doc.at("geometry");
        constexpr std::string_view gw = "system.geometry";
        require_object(g, gw);
        reject_unknown_keys(g, gw, {"irs_distance_m", "user_ring_min_m", "user_ring_max_m", "shadowing_var_db"});
        read_optional(g, gw, "irs_distance_m", c.geometry.irs_distance_m);
        read_optional(g, gw, "user_ring_min_m", c.geometry.user_ring_min_m);
        read_optional(g, gw, "user_ring_max_m", c.geometry.user_ring_max_m);
        read_optional(g, gw, "shadowing_var_db", c.geometry.shadowing_var_db);
    }
    return c;
}

json system_to_json(const SystemConfig& c) {
    json doc = {{"n_tx", c.n_tx},
                {"n_users", c.n_users},
                {"n_elements", c.n_elements},
                {"noise_var", c.noise_var},
                {"err_var_bu", c.err_var_bu},
                {"err_var_iu", c.err_var_iu},
                {"gain_mode", c.gain_mode == GainMode::normalized ? "normalized" : "geometric"},
                {"beta_bi", c.beta_bi},
                {"geometry",
                 {{"irs_distance_m", c.geometry.irs_distance_m},
                  {"user_ring_min_m", c.geometry.user_ring_min_m},
                  {"user_ring_max_m", c.geometry.user_ring_max_m},
                  {"shadowing_var_db", c.geometry.shadowing_var_db}}}};
    if (c.snr_db) doc["snr_db"] = *c.snr_db;
    else doc["power_budget"] = c.power_budget;
    if (!c.weights.empty()) doc["weights"] = c.weights;
    if (!c.beta_bu.empty()) doc["beta_bu"] = c.beta_bu;
    if (!c.beta_iu.empty()) doc["beta_iu"] = c.beta_iu;
    return doc;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::robust: return "robust";
        case Scheme::non_robust: return "non_robust";
        case Scheme::perfect_csi: return "perfect_csi";
    }
    return "unknown";
}

std::string_view to_string(SweepParam param) {
    switch (param) {
        case SweepParam::n_elements: return "M";
        case SweepParam::snr_db: return "snr_db";
        case SweepParam::err_var: return "err_var";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::robust, Scheme::non_robust, Scheme::perfect_csi})
        if (to_string(s) == name) return s;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

SweepParam parse_sweep_param(std::string_view name) {
    for (SweepParam p : {SweepParam::n_elements, SweepParam::snr_db, SweepParam::err_var})
        if (to_string(p) == name) return p;
    throw ConfigError("unknown sweep parameter '" + std::string(name) + "' (expected M, snr_db or err_var)");
}

SystemConfig Scenario::config_at(double value) const {
    SystemConfig c = system;
    switch (sweep.param) {
        case SweepParam::n_elements: c.n_elements = static_cast<int>(std::lround(value)); break;
        case SweepParam::snr_db: c.snr_db = value; break;
        case SweepParam::err_var:
            c.err_var_bu = value;
            c.err_var_iu = value;
            break;
    }
    return c;
}

void Scenario::validate_unordered() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sweep.values.empty()) throw ConfigError("sweep.values must not be empty");
    std::set<double> seen;
    for (double v : sweep.values) {
        if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
        if (!seen.insert(v).second) throw ConfigError("sweep values must be distinct");
        if (sweep.param == SweepParam::n_elements && (v != std::round(v) || v < 1))
            throw ConfigError("M sweep values must be positive integers");
    }
    std::set<Scheme> unique_schemes(schemes.begin(), schemes.end());
    if (unique_schemes.size() != schemes.size()) throw ConfigError("schemes must not repeat");
    solver_options.validate();
    for (double v : sweep.values) {
        try {
            config_at(v).validate();
        } catch (const ConfigError& e) {
            throw ConfigError("at " + std::string(to_string(sweep.param)) + " = " + std::to_string(v) + ": " +
                              e.what());
        }
    }
}

void Scenario::validate() const {
    validate_unordered();
    if (!std::is_sorted(sweep.values.begin(), sweep.values.end()))
        throw ConfigError("sweep values must be strictly increasing");
}

SolverOptions parse_solver_options(const json& doc) {
    constexpr std::string_view where = "solver_options";
    require_object(doc, where);
    reject_unknown_keys(doc, where,
                        {"inner_tol", "inner_max_sweeps", "outer_tol", "outer_max_iters", "rho_decay", "rho_init",
                         "violation_shrink", "phase_cd_sweeps"});
    SolverOptions o;
    read_optional(doc, where, "inner_tol", o.inner_tol);
    if (doc.contains("inner_max_sweeps")) o.inner_max_sweeps = get_int(doc, where, "inner_max_sweeps");
    read_optional(doc, where, "outer_tol", o.outer_tol);
    if (doc.contains("outer_max_iters")) o.outer_max_iters = get_int(doc, where, "outer_max_iters");
    read_optional(doc, where, "rho_decay", o.rho_decay);
    if (doc.contains("rho_init")) o.rho_init = get_field<double>(doc, where, "rho_init");
    read_optional(doc, where, "violation_shrink", o.violation_shrink);
    if (doc.contains("phase_cd_sweeps")) o.phase_cd_sweeps = get_int(doc, where, "phase_cd_sweeps");
    return o;
}

json to_json(const SolverOptions& o) {
    json doc = {{"inner_tol", o.inner_tol},
                {"inner_max_sweeps", o.inner_max_sweeps},
                {"outer_tol", o.outer_tol},
                {"outer_max_iters", o.outer_max_iters},
                {"rho_decay", o.rho_decay},
                {"violation_shrink", o.violation_shrink},
                {"phase_cd_sweeps", o.phase_cd_sweeps}};
    if (o.rho_init) doc["rho_init"] = *o.rho_init;
    return doc;
}

Scenario parse_scenario(const json& doc) {
    constexpr std::string_view where = "scenario";
    require_object(doc, where);
    reject_unknown_keys(doc, where, {"system", "sweep", "schemes", "trials", "master_seed", "solver_options"});
    Scenario s;
    if (!doc.contains("system")) throw ConfigError("scenario: missing 'system'");
    s.system = parse_system(doc.at("system"));

    if (!doc.contains("sweep")) throw ConfigError("scenario: missing 'sweep'");
    const json& sw = doc.at("sweep");
    require_object(sw, "sweep");
    reject_unknown_keys(sw, "sweep", {"param", "values"});
    s.sweep.param = parse_sweep_param(get_field<std::string>(sw, "sweep", "param"));
    s.sweep.values = get_field<std::vector<double>>(sw, "sweep", "values");

    if (doc.contains("schemes")) {
        s.schemes.clear();
        for (const auto& name : get_field<std::vector<std::string>>(doc, where, "schemes"))
            s.schemes.push_back(parse_scheme(name));
    } else {
        s.schemes = {Scheme::robust, Scheme::non_robust, Scheme::perfect_csi};
    }
    if (doc.contains("trials")) s.trials = get_int(doc, where, "trials");
    if (doc.contains("master_seed")) {
        const json& seed = doc.at("master_seed");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
            throw ConfigError("scenario.master_seed: expected a nonnegative integer");
        s.master_seed = seed.get<std::uint64_t>();
    }
    if (doc.contains("solver_options")) s.solver_options = parse_solver_options(doc.at("solver_options"));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

json to_json(const Scenario& s) {
    json schemes = json::array();
    for (Scheme sc : s.schemes) schemes.push_back(std::string(to_string(sc)));
    return {{"system", system_to_json(s.system)},
            {"sweep", {{"param", std::string(to_string(s.sweep.param))}, {"values", s.sweep.values}}},
            {"schemes", schemes},
            {"trials", s.trials},
            {"master_seed", s.master_seed},
            {"solver_options", to_json(s.solver_options)}};
}

}  // namespace irsbf
