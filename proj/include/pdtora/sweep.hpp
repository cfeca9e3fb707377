#ifndef PDTORA_SWEEP_HPP
#define PDTORA_SWEEP_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdtora/metrics.hpp"
#include "pdtora/scenario.hpp"

namespace pdtora {

enum class SweepAxis
{
    Speed, // max_speed_m_s
    Nodes, // num_nodes
};

SweepAxis parse_axis(std::string_view s);
std::string_view to_string(SweepAxis a);

struct SweepSpec
{
    ScenarioConfig base;
    SweepAxis axis = SweepAxis::Speed;
    std::vector<double> values;
    std::uint32_t seeds = 10; // seeds 1..seeds
    std::vector<Protocol> protocols{Protocol::Tora, Protocol::Pdtora};
};

struct RunResult;

/// Called once per finished run, possibly from a worker thread.
using RunHook = std::function<void(const RunResult &)>;

struct SweepCell
{
    ScenarioConfig config;
    MetricsReport report;
    std::string error; // non-empty: the cell failed and has no report
};

/// Cells in (value, protocol, seed) order regardless of how they were run.
struct SweepResult
{
    SweepSpec spec;
    std::vector<SweepCell> cells;

    /// Successful cells sharing a value and protocol, in seed order.
    std::vector<const SweepCell *> group(double value, Protocol p) const;
    std::vector<const SweepCell *> failures() const;
};

/// Configuration of every cell, in result order. Not validated.
std::vector<ScenarioConfig> expand_sweep(const SweepSpec &spec);

/// Runs the cells in an OpenMP parallel loop. Each run stays single-threaded.
/// A cell whose config fails validation or whose run throws is reported in
/// its error field; the other cells still run.
SweepResult run_sweep(const SweepSpec &spec, const RunHook &hook = {});

/// Serial reference; produces the same result as run_sweep.
SweepResult run_sweep_serial(const SweepSpec &spec, const RunHook &hook = {});

std::string run_label(const ScenarioConfig &cfg);
RunKey run_key(const ScenarioConfig &cfg);

/// Header, one row per successful run, then one "mean" row per
/// (value, protocol) that has at least one successful run.
void write_summary_csv(std::ostream &out, const SweepResult &r);

} // namespace pdtora

#endif
