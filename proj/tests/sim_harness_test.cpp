#include "irsbf/sim_harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "irsbf/bench.hpp"
#include "irsbf/errors.hpp"
#include "irsbf/results_io.hpp"
#include "irsbf/scenario.hpp"
#include "json.hpp"

namespace irsbf {
namespace {

using nlohmann::json;

Scenario small_scenario(std::vector<double> m_values, int trials, double err_var = 0.1) {
    Scenario s;
    s.system.n_tx = 2;
    s.system.n_users = 2;
    s.system.snr_db = 10.0;
    s.system.err_var_bu = err_var;
    s.system.err_var_iu = err_var;
    s.sweep = {SweepParam::n_elements, std::move(m_values)};
    s.schemes = {Scheme::robust, Scheme::non_robust, Scheme::perfect_csi};
    s.trials = trials;
    s.master_seed = 4242;
    return s;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// ---------------------------------------------------------------- run_trial

TEST(RunTrial, ZeroErrorSchemesCoincide) {
    const Scenario s = small_scenario({4}, 1, 0.0);
    for (std::uint64_t t = 0; t < 5; ++t) {
        const auto out = run_trial(s, 4, t);
        ASSERT_EQ(out.size(), 3u);
        for (const auto& o : out) ASSERT_FALSE(o.failed) << o.error;
        EXPECT_NEAR(out[0].sum_rate, out[1].sum_rate, 1e-9);
        EXPECT_NEAR(out[0].sum_rate, out[2].sum_rate, 1e-9);
        EXPECT_NEAR(out[0].sum_rate, out[0].genie_sum_rate, 1e-9);
    }
}

TEST(RunTrial, Deterministic) {
    const Scenario s = small_scenario({6}, 1);
    EXPECT_EQ(run_trial(s, 6, 3), run_trial(s, 6, 3));
    EXPECT_NE(run_trial(s, 6, 3)[0].sum_rate, run_trial(s, 6, 4)[0].sum_rate);
}

TEST(RunTrial, SchemesFollowRequestOrder) {
    Scenario s = small_scenario({4}, 1);
    s.schemes = {Scheme::perfect_csi, Scheme::robust};
    const auto out = run_trial(s, 4, 0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].scheme, Scheme::perfect_csi);
    EXPECT_EQ(out[1].scheme, Scheme::robust);
}

TEST(RunScenario, PerfectCsiBeatsRobustOnAverage) {
    Scenario s = small_scenario({4}, 50);
    s.system.n_users = 1;
    s.system.n_tx = 2;
    s.schemes = {Scheme::robust, Scheme::perfect_csi};
    const MonteCarloResult r = run_scenario(s, 2);
    const double robust = r.summary(4, Scheme::robust).mean;
    const double perfect = r.summary(4, Scheme::perfect_csi).mean;
    EXPECT_GE(robust, 0.0);
    EXPECT_GE(perfect, robust);
}

// A per-trial version of this does not hold: both designs are local solutions of a
// nonconvex problem, and the non-robust run occasionally lands in a better basin.
TEST(RunScenario, RobustDominatesNonRobustOnAverage) {
    Scenario s = small_scenario({8}, 40, 0.2);
    s.schemes = {Scheme::robust, Scheme::non_robust};
    const MonteCarloResult r = run_scenario(s, 2);
    EXPECT_GT(r.summary(8, Scheme::robust).mean, r.summary(8, Scheme::non_robust).mean);
    int wins = 0;
    for (int t = 0; t < 40; ++t) {
        const double rob = r.records[static_cast<std::size_t>(t)].outcome.sum_rate;
        const double non = r.records[static_cast<std::size_t>(40 + t)].outcome.sum_rate;
        wins += rob >= non - 1e-6;
    }
    EXPECT_GE(wins, 28);
}

// ---------------------------------------------------------------- run_scenario

TEST(RunScenario, SingleTrialHasZeroSpread) {
    const MonteCarloResult r = run_scenario(small_scenario({4}, 1), 1);
    for (const auto& sum : r.summaries) {
        EXPECT_EQ(sum.std, 0.0);
        EXPECT_EQ(sum.ci95, 0.0);
        EXPECT_EQ(sum.trials_ok, 1);
    }
    for (const auto& rec : r.records) EXPECT_EQ(r.summary(rec.sweep_value, rec.scheme).mean, rec.outcome.sum_rate);
}

TEST(RunScenario, SweepOrderDoesNotMatter) {
    const MonteCarloResult a = run_scenario(small_scenario({2, 3, 5}, 3), 1);
    const MonteCarloResult b = run_scenario(small_scenario({5, 2, 3}, 3), 1);
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(RunScenario, ThreadCountDoesNotMatter) {
    const Scenario s = small_scenario({3, 6}, 5);
    const MonteCarloResult one = run_scenario(s, 1);
    EXPECT_EQ(one, run_scenario(s, 3));
    EXPECT_EQ(to_csv(one), to_csv(run_scenario(s, 8)));
}

TEST(RunScenario, RecordsAreSortedAndComplete) {
    const MonteCarloResult r = run_scenario(small_scenario({4, 2}, 3), 2);
    ASSERT_EQ(r.records.size(), 2u * 3u * 3u);
    EXPECT_EQ(r.sweep_values, (std::vector<double>{2, 4}));
    for (std::size_t i = 1; i < r.records.size(); ++i) {
        const auto& p = r.records[i - 1];
        const auto& q = r.records[i];
        EXPECT_TRUE(std::tie(p.sweep_value, p.scheme, p.trial) < std::tie(q.sweep_value, q.scheme, q.trial));
    }
    for (const auto& sum : r.summaries) {
        EXPECT_GE(sum.mean, sum.min);
        EXPECT_LE(sum.mean, sum.max);
        EXPECT_EQ(sum.trials_ok + sum.trials_failed, 3);
    }
}

TEST(RunScenario, TooManyFailuresIsAnError) {
    Scenario s = small_scenario({4}, 10, 0.0);
    s.system.gain_mode = GainMode::geometric;
    // most geometric draws have a gain below this
    s.system.err_var_bu = 1e-9;
    s.system.err_var_iu = 1e-9;
    EXPECT_THROW(run_scenario(s, 1), ScenarioError);
    const auto out = run_trial(s, 4, 0);
    EXPECT_TRUE(out[0].failed);
    EXPECT_TRUE(std::isnan(out[0].sum_rate));
    EXPECT_NE(out[0].error.find("error variance exceeds channel gain"), std::string::npos);
}

TEST(Summarize, ExcludesFailedTrials) {
    std::vector<TrialRecord> recs(4);
    const double rates[] = {1.0, 2.0, 3.0, std::nan("")};
    for (int i = 0; i < 4; ++i) {
        recs[i].sweep_value = 1.0;
        recs[i].trial = i;
        recs[i].outcome.sum_rate = rates[i];
        recs[i].outcome.outer_iters = 10 * (i + 1);
        recs[i].outcome.converged = i != 1;
        recs[i].outcome.failed = i == 3;
    }
    const PointSummary s = summarize(1.0, Scheme::robust, recs);
    EXPECT_EQ(s.trials_ok, 3);
    EXPECT_EQ(s.trials_failed, 1);
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.std, 1.0);
    EXPECT_DOUBLE_EQ(s.ci95, 1.96 / std::sqrt(3.0));
    EXPECT_DOUBLE_EQ(s.min, 1.0);
    EXPECT_DOUBLE_EQ(s.max, 3.0);
    EXPECT_DOUBLE_EQ(s.mean_outer_iters, 20.0);
    EXPECT_DOUBLE_EQ(s.converged_fraction, 2.0 / 3.0);
}

// ---------------------------------------------------------------- emission

TEST(EmitResults, EmptySchemeSetIsHeaderOnly) {
    Scenario s = small_scenario({4}, 2);
    s.schemes.clear();
    EXPECT_EQ(to_csv(run_scenario(s, 1)), std::string(kCsvHeader) + "\n");
}

TEST(EmitResults, RowCountArithmetic) {
    Scenario s = small_scenario({2, 4}, 3);
    s.schemes = {Scheme::robust, Scheme::perfect_csi};
    const auto lines = split_lines(to_csv(run_scenario(s, 2)));
    ASSERT_EQ(lines.size(), 1u + 12u + 12u);
    EXPECT_EQ(lines[0], kCsvHeader);
    int data = 0, summary = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_fields(lines[i]);
        ASSERT_EQ(f.size(), 7u) << lines[i];
        EXPECT_EQ(f[0], "M");
        if (f[3] == "mean" || f[3] == "std" || f[3] == "ci95") ++summary;
        else ++data;
    }
    EXPECT_EQ(data, 12);
    EXPECT_EQ(summary, 12);
}

TEST(EmitResults, CsvAggregatesAreRecomputable) {
    const auto lines = split_lines(to_csv(run_scenario(small_scenario({3, 5}, 6), 2)));
    std::map<std::pair<std::string, std::string>, std::vector<double>> rates;
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> stats;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_fields(lines[i]);
        const auto key = std::make_pair(f[1], f[2]);
        if (f[3] == "mean" || f[3] == "std" || f[3] == "ci95") stats[key][f[3]] = std::stod(f[4]);
        else rates[key].push_back(std::stod(f[4]));
    }
    ASSERT_EQ(rates.size(), 6u);
    for (const auto& [key, xs] : rates) {
        const double n = static_cast<double>(xs.size());
        double mean = 0.0;
        for (double x : xs) mean += x / n;
        double sq = 0.0;
        for (double x : xs) sq += (x - mean) * (x - mean);
        const double sd = std::sqrt(sq / (n - 1.0));
        EXPECT_NEAR(stats[key]["mean"], mean, 1e-9 * (1.0 + mean));
        EXPECT_NEAR(stats[key]["std"], sd, 1e-9 * (1.0 + sd));
        EXPECT_NEAR(stats[key]["ci95"], 1.96 * sd / std::sqrt(n), 1e-9 * (1.0 + sd));
    }
}

TEST(EmitResults, JsonRoundTripIsExact) {
    const MonteCarloResult r = run_scenario(small_scenario({2, 4}, 3), 2);
    const json doc = json::parse(to_json(r).dump());
    EXPECT_EQ(monte_carlo_result_from_json(doc), r);
}

TEST(EmitResults, FailedTrialsSurviveRoundTrip) {
    MonteCarloResult r = run_scenario(small_scenario({2}, 2), 1);
    r.records[0].outcome = SchemeOutcome{};
    r.records[0].outcome.failed = true;
    r.records[0].outcome.error = "boom";
    r.records[0].outcome.sum_rate = std::nan("");
    r.records[0].outcome.genie_sum_rate = std::nan("");
    const MonteCarloResult back = monte_carlo_result_from_json(json::parse(to_json(r).dump()));
    EXPECT_TRUE(back.records[0].outcome.failed);
    EXPECT_TRUE(std::isnan(back.records[0].outcome.sum_rate));
    EXPECT_EQ(back.records[0].outcome.error, "boom");
    EXPECT_NE(to_csv(r).find(",nan,"), std::string::npos);
}

TEST(EmitResults, UnwritablePathNamesThePath) {
    const MonteCarloResult r = run_scenario(small_scenario({2}, 1), 1);
    try {
        emit_results(r, OutputFormat::csv, "/nonexistent-dir/out.csv");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
    }
}

TEST(FormatNumber, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(20.0), "20");
    EXPECT_EQ(format_number(1e-7), "1e-07");
}

TEST(ConvergenceReportJson, HasExactlyTheDocumentedKeys) {
    ConvergenceReport rep;
    rep.outer_iters = 3;
    rep.inner_sweeps_total = 7;
    rep.final_violation = 1e-6;
    rep.objective_trace = {3.0, 2.0, 1.0};
    rep.wall_time_ms = 0.5;
    const json doc = to_json(rep);
    EXPECT_EQ(doc.size(), 5u);
    for (const char* k : {"outer_iters", "inner_sweeps_total", "final_violation", "objective_trace", "wall_time_ms"})
        EXPECT_TRUE(doc.contains(k)) << k;
    EXPECT_EQ(doc["objective_trace"].size(), 3u);
}

// ---------------------------------------------------------------- scenario parsing

json minimal_scenario_doc() {
    return json::parse(R"({
        "system": {"n_tx": 2, "n_users": 2, "snr_db": 10, "err_var_bu": 0.1, "err_var_iu": 0.1},
        "sweep": {"param": "M", "values": [4, 8]},
        "trials": 3,
        "master_seed": 9
    })");
}

TEST(ScenarioParse, MinimalDocument) {
    const Scenario s = parse_scenario(minimal_scenario_doc());
    EXPECT_EQ(s.schemes.size(), 3u);
    EXPECT_EQ(s.trials, 3);
    EXPECT_EQ(s.master_seed, 9u);
    EXPECT_DOUBLE_EQ(s.config_at(8).transmit_power(), 10.0);
    EXPECT_EQ(s.config_at(8).n_elements, 8);
    EXPECT_NO_THROW(s.validate());
}

TEST(ScenarioParse, RoundTripsThroughJson) {
    const Scenario s = parse_scenario(minimal_scenario_doc());
    EXPECT_EQ(to_json(parse_scenario(to_json(s))), to_json(s));
}

TEST(ScenarioParse, RejectsUnknownKeys) {
    json doc = minimal_scenario_doc();
    doc["colour"] = "blue";
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal_scenario_doc();
    doc["system"]["n_antennas"] = 4;
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal_scenario_doc();
    doc["solver_options"] = {{"inner_tolerance", 1e-3}};
    EXPECT_THROW(parse_scenario(doc), ConfigError);
}

TEST(ScenarioParse, RejectsBadValues) {
    json doc = minimal_scenario_doc();
    doc["system"]["power_budget"] = 10.0;
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal_scenario_doc();
    doc["schemes"] = {"robust", "optimistic"};
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal_scenario_doc();
    doc["sweep"]["param"] = "K";
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal_scenario_doc();
    doc["system"]["n_tx"] = "two";
    EXPECT_THROW(parse_scenario(doc), ConfigError);
    doc = minimal_scenario_doc();
    doc.erase("sweep");
    EXPECT_THROW(parse_scenario(doc), ConfigError);
}

TEST(ScenarioValidate, Invariants) {
    Scenario s = parse_scenario(minimal_scenario_doc());
    s.sweep.values = {8, 4};
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_NO_THROW(s.validate_unordered());
    s.sweep.values = {4, 4};
    EXPECT_THROW(s.validate_unordered(), ConfigError);
    s.sweep.values = {4.5};
    EXPECT_THROW(s.validate_unordered(), ConfigError);
    s = parse_scenario(minimal_scenario_doc());
    s.trials = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = parse_scenario(minimal_scenario_doc());
    s.system.err_var_iu = 1.5;
    try {
        s.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("error variance exceeds channel gain"), std::string::npos);
    }
}

TEST(ScenarioValidate, ErrVarSweepChecksEveryPoint) {
    json doc = minimal_scenario_doc();
    doc["system"]["n_elements"] = 4;
    doc["sweep"] = {{"param", "err_var"}, {"values", {0.0, 0.5, 2.0}}};
    EXPECT_THROW(parse_scenario(doc).validate(), ConfigError);
    doc["sweep"]["values"] = {0.0, 0.5};
    const Scenario s = parse_scenario(doc);
    EXPECT_NO_THROW(s.validate());
    EXPECT_DOUBLE_EQ(s.config_at(0.5).err_var_bu, 0.5);
    EXPECT_DOUBLE_EQ(s.config_at(0.5).err_var_iu, 0.5);
}

TEST(ScenarioFiles, ShippedScenariosValidate) {
    const std::filesystem::path dir = IRSBF_SCENARIO_DIR;
    const Scenario vs_m = load_scenario(dir / "sum_rate_vs_m.json");
    EXPECT_NO_THROW(vs_m.validate());
    EXPECT_EQ(vs_m.system.n_users, 4);
    EXPECT_EQ(vs_m.sweep.values, (std::vector<double>{20, 40, 60, 80}));
    std::ifstream in(dir / "bench.json");
    EXPECT_NO_THROW(parse_bench_config(json::parse(in)).validate());
}

TEST(ScenarioFiles, MissingFileIsIoError) {
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), IoError);
}

// ---------------------------------------------------------------- bench

TEST(Bench, ReportsDoublingRatios) {
    BenchConfig c;
    c.m_values = {4, 8, 12};
    c.sweeps = 20;
    const BenchReport rep = run_bench(c);
    ASSERT_EQ(rep.points.size(), 3u);
    ASSERT_EQ(rep.m_doubling_ratios.size(), 1u);
    EXPECT_EQ(rep.m_doubling_ratios[0].m_from, 4);
    EXPECT_EQ(rep.m_doubling_ratios[0].m_to, 8);
    EXPECT_GT(rep.m_doubling_ratios[0].ratio, 0.0);
    const json doc = to_json(rep);
    EXPECT_EQ(doc["points"].size(), 3u);
    EXPECT_GT(doc["points"][0]["mean_sweep_ms"].get<double>(), 0.0);
}

TEST(Bench, ConfigIsStrict) {
    EXPECT_THROW(parse_bench_config(json{{"m_values", {64}}, {"sweeps", 5}}).validate(), ConfigError);
    EXPECT_THROW(parse_bench_config(json{{"speed", 1}}), ConfigError);
}

}  // namespace
}  // namespace irsbf
