#include "irsbf/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "irsbf/errors.hpp"

namespace irsbf {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) { return v.is_null() ? std::nan("") : v.get<double>(); }

json outcome_to_json(const SchemeOutcome& o) {
    return {{"failed", o.failed},
            {"error", o.error},
            {"sum_rate", number_or_null(o.sum_rate)},
            {"genie_sum_rate", number_or_null(o.genie_sum_rate)},
            {"outer_iters", o.outer_iters},
            {"final_violation", number_or_null(o.final_violation)},
            {"converged", o.converged}};
}

SchemeOutcome outcome_from_json(const json& doc, Scheme scheme) {
    SchemeOutcome o;
    o.scheme = scheme;
    o.failed = doc.at("failed").get<bool>();
    o.error = doc.at("error").get<std::string>();
    o.sum_rate = number_from(doc.at("sum_rate"));
    o.genie_sum_rate = number_from(doc.at("genie_sum_rate"));
    o.outer_iters = doc.at("outer_iters").get<int>();
    o.final_violation = number_from(doc.at("final_violation"));
    o.converged = doc.at("converged").get<bool>();
    return o;
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string to_csv(const MonteCarloResult& result) {
    std::string out(kCsvHeader);
    out += '\n';
    const std::string param(to_string(result.sweep_param));
    for (const auto& r : result.records) {
        out += param + ',' + format_number(r.sweep_value) + ',' + std::string(to_string(r.scheme)) + ',' +
               std::to_string(r.trial) + ',' + format_number(r.outcome.sum_rate) + ',' +
               std::to_string(r.outcome.outer_iters) + ',' + format_number(r.outcome.final_violation) + '\n';
    }
    for (const auto& s : result.summaries) {
        const std::string prefix =
            param + ',' + format_number(s.sweep_value) + ',' + std::string(to_string(s.scheme)) + ',';
        out += prefix + "mean," + format_number(s.mean) + ',' + format_number(s.mean_outer_iters) + ',' +
               format_number(s.mean_final_violation) + '\n';
        out += prefix + "std," + format_number(s.std) + ",,\n";
        out += prefix + "ci95," + format_number(s.ci95) + ",,\n";
    }
    return out;
}

json to_json(const MonteCarloResult& result) {
    json schemes = json::array();
    for (Scheme s : result.schemes) schemes.push_back(std::string(to_string(s)));
    json records = json::array();
    for (const auto& r : result.records) {
        json row = outcome_to_json(r.outcome);
        row["sweep_value"] = r.sweep_value;
        row["scheme"] = std::string(to_string(r.scheme));
        row["trial"] = r.trial;
        records.push_back(std::move(row));
    }
    json summaries = json::array();
    for (const auto& s : result.summaries) {
        summaries.push_back({{"sweep_value", s.sweep_value},
                             {"scheme", std::string(to_string(s.scheme))},
                             {"trials_ok", s.trials_ok},
                             {"trials_failed", s.trials_failed},
                             {"mean", number_or_null(s.mean)},
                             {"std", number_or_null(s.std)},
                             {"ci95", number_or_null(s.ci95)},
                             {"min", number_or_null(s.min)},
                             {"max", number_or_null(s.max)},
                             {"mean_outer_iters", number_or_null(s.mean_outer_iters)},
                             {"mean_final_violation", number_or_null(s.mean_final_violation)},
                             {"converged_fraction", number_or_null(s.converged_fraction)}});
    }
    return {{"sweep_param", std::string(to_string(result.sweep_param))},
            {"sweep_values", result.sweep_values},
            {"schemes", schemes},
            {"trials", result.trials},
            {"master_seed", result.master_seed},
            {"records", records},
            {"summaries", summaries}};
}

MonteCarloResult monte_carlo_result_from_json(const json& doc) {
    MonteCarloResult r;
    r.sweep_param = parse_sweep_param(doc.at("sweep_param").get<std::string>());
    r.sweep_values = doc.at("sweep_values").get<std::vector<double>>();
    for (const auto& s : doc.at("schemes")) r.schemes.push_back(parse_scheme(s.get<std::string>()));
    r.trials = doc.at("trials").get<int>();
    r.master_seed = doc.at("master_seed").get<std::uint64_t>();
    for (const auto& row : doc.at("records")) {
        TrialRecord t;
        t.sweep_value = row.at("sweep_value").get<double>();
        t.scheme = parse_scheme(row.at("scheme").get<std::string>());
        t.trial = row.at("trial").get<int>();
        t.outcome = outcome_from_json(row, t.scheme);
        r.records.push_back(std::move(t));
    }
    for (const auto& row : doc.at("summaries")) {
        PointSummary s;
        s.sweep_value = row.at("sweep_value").get<double>();
        s.scheme = parse_scheme(row.at("scheme").get<std::string>());
        s.trials_ok = row.at("trials_ok").get<int>();
        s.trials_failed = row.at("trials_failed").get<int>();
        s.mean = number_from(row.at("mean"));
        s.std = number_from(row.at("std"));
        s.ci95 = number_from(row.at("ci95"));
        s.min = number_from(row.at("min"));
        s.max = number_from(row.at("max"));
        s.mean_outer_iters = number_from(row.at("mean_outer_iters"));
        s.mean_final_violation = number_from(row.at("mean_final_violation"));
        s.converged_fraction = number_from(row.at("converged_fraction"));
        r.summaries.push_back(s);
    }
    return r;
}

void emit_results(const MonteCarloResult& result, OutputFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file '" + path.string() + "' for writing");
    if (format == OutputFormat::csv) out << to_csv(result);
    else out << to_json(result).dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing output file '" + path.string() + "'");
}

json to_json(const ConvergenceReport& report) {
    return {{"outer_iters", report.outer_iters},
            {"inner_sweeps_total", report.inner_sweeps_total},
            {"final_violation", report.final_violation},
            {"objective_trace", report.objective_trace},
            {"wall_time_ms", report.wall_time_ms}};
}

}  // namespace irsbf
