// pdtora: single seeded runs and parameter sweeps, CSV output.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "pdtora/numfmt.hpp"
#include "pdtora/simulator.hpp"
#include "pdtora/sweep.hpp"

namespace fs = std::filesystem;
using namespace pdtora;

namespace {

std::ofstream open_out(const fs::path &p)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + p.string());
    return f;
}

void write_run_files(const fs::path &dir, const RunResult &r, bool with_trace)
{
    const std::string label = run_label(r.scenario);
    auto tl = open_out(dir / ("timeline_" + label + ".csv"));
    write_timeline_csv(tl, r.report.deaths);
    if (with_trace) {
        auto tr = open_out(dir / ("trace_" + label + ".csv"));
        r.trace.write_csv(tr);
    }
}

std::vector<double> parse_values(const std::string &csv)
{
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(parse_number(item));
    if (out.empty())
        throw std::invalid_argument("--values: empty list");
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Deterministic MANET simulator for TORA and PDTORA"};
    app.require_subcommand(1);

    std::string scenario, out_dir, protocol, axis, values;
    std::uint64_t seed = 1;
    std::uint32_t seeds = 10;
    bool serial = false, traces = false, hops = false;

    auto *run_cmd = app.add_subcommand("run", "one seeded run");
    run_cmd->add_option("--scenario", scenario, "scenario file")->required();
    run_cmd->add_option("--seed", seed, "RNG seed");
    run_cmd->add_option("--protocol", protocol, "tora or pdtora (default: from scenario)");
    run_cmd->add_option("--out", out_dir, "output directory")->required();
    run_cmd->add_flag("--data-hops", hops, "trace per-hop DATA tx/rx");

    auto *sweep_cmd = app.add_subcommand("sweep", "parameter sweep over both protocols");
    sweep_cmd->add_option("--scenario", scenario, "base scenario file")->required();
    sweep_cmd->add_option("--axis", axis, "speed or nodes")->required();
    sweep_cmd->add_option("--values", values, "comma-separated axis values")->required();
    sweep_cmd->add_option("--seeds", seeds, "seeds 1..N");
    sweep_cmd->add_option("--out", out_dir, "output directory")->required();
    sweep_cmd->add_flag("--serial", serial, "run cells one at a time");
    sweep_cmd->add_flag("--traces", traces, "also write trace_<run>.csv per run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        ScenarioConfig cfg = load_scenario(scenario);
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);

        if (*run_cmd) {
            cfg.seed = seed;
            if (!protocol.empty())
                cfg.protocol = parse_protocol(protocol);
            validate(cfg);
            SimOptions opts;
            opts.trace_data_hops = hops;
            const RunResult r = run(cfg, opts);
            auto sum = open_out(dir / "summary.csv");
            sum << kSummaryHeader << '\n' << summary_row(run_key(cfg), r.report) << '\n';
            write_run_files(dir, r, true);
            return 0;
        }

        SweepSpec spec;
        spec.base = cfg;
        spec.axis = parse_axis(axis);
        spec.values = parse_values(values);
        spec.seeds = seeds;
        std::mutex io;
        std::string io_error;
        const RunHook hook = [&](const RunResult &r) {
            try {
                write_run_files(dir, r, traces);
            } catch (const std::exception &e) {
                std::lock_guard lock(io);
                io_error = e.what();
            }
        };
        const SweepResult res = serial ? run_sweep_serial(spec, hook) : run_sweep(spec, hook);
        if (!io_error.empty())
            throw std::runtime_error(io_error);
        auto sum = open_out(dir / "summary.csv");
        write_summary_csv(sum, res);
        const auto failed = res.failures();
        for (const auto *c : failed)
            std::cerr << "cell " << run_label(c->config) << " failed: " << c->error << '\n';
        if (!failed.empty()) {
            std::cerr << "error: " << failed.size() << " of " << res.cells.size() << " sweep cells failed\n";
            return 1;
        }
        return 0;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
