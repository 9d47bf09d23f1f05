// irsbf: Monte Carlo driver for robust IRS-aided MISO beamforming.
//
//   irsbf run --scenario scenarios/sum_rate_vs_m.json --out sum_rate_vs_m.csv [--format csv|json]
//             [--seed N] [--trials N] [--threads N]
//   irsbf validate --scenario scenarios/sum_rate_vs_m.json
//   irsbf bench --config scenarios/bench.json [--out bench.json]
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "irsbf/bench.hpp"
#include "irsbf/errors.hpp"
#include "irsbf/results_io.hpp"
#include "irsbf/scenario.hpp"
#include "irsbf/sim_harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::uint64_t parse_seed_env(const char* text) {
    std::size_t used = 0;
    const std::string s(text);
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-')
        throw irsbf::ConfigError("MASTER_SEED must be a decimal integer, got '" + s + "'");
    return v;
}

void print_summary(const irsbf::MonteCarloResult& result) {
    for (const auto& s : result.summaries) {
        std::cout << irsbf::to_string(result.sweep_param) << '=' << irsbf::format_number(s.sweep_value) << ' '
                  << irsbf::to_string(s.scheme) << " mean=" << irsbf::format_number(s.mean)
                  << " ci95=" << irsbf::format_number(s.ci95) << " failed=" << s.trials_failed << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust joint BS/IRS beamforming: Monte Carlo sum-rate evaluation"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, format = "csv", bench_path, bench_out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int threads = 1;

    auto* run = app.add_subcommand("run", "Run a Monte Carlo scenario and write per-trial results");
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--out", out_path, "Output file")->required();
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--seed", seed, "Master seed (overrides the file and MASTER_SEED)");
    run->add_option("--trials", trials, "Trials per sweep point (overrides the file)");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a scenario file against all invariants");
    validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    auto* bench = app.add_subcommand("bench", "Time BSUM sweeps across M and N_T");
    bench->add_option("--config", bench_path, "Bench JSON file")->required();
    bench->add_option("--out", bench_out, "Also write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (*validate) {
            irsbf::load_scenario(scenario_path).validate();
            std::cout << "ok: " << scenario_path << '\n';
            return kExitOk;
        }

        if (*bench) {
            std::ifstream in(bench_path);
            if (!in) throw irsbf::IoError("cannot open bench config '" + bench_path + "'");
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw irsbf::ConfigError("bench config '" + bench_path + "' is not valid JSON: " + e.what());
            }
            const auto config = irsbf::parse_bench_config(doc);
            const auto text = irsbf::to_json(irsbf::run_bench(config)).dump(2);
            std::cout << text << '\n';
            if (!bench_out.empty()) {
                std::ofstream out(bench_out, std::ios::trunc);
                out << text << '\n';
                if (!out) throw irsbf::IoError("failed writing '" + bench_out + "'");
            }
            return kExitOk;
        }

        irsbf::Scenario scenario = irsbf::load_scenario(scenario_path);
        if (seed) scenario.master_seed = *seed;
        else if (const char* env = std::getenv("MASTER_SEED")) scenario.master_seed = parse_seed_env(env);
        if (trials) scenario.trials = *trials;
        scenario.validate();
        const auto fmt = irsbf::parse_output_format(format);

        const auto result = irsbf::run_scenario(scenario, threads);
        irsbf::emit_results(result, fmt, out_path);
        print_summary(result);
        return kExitOk;
    } catch (const irsbf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
