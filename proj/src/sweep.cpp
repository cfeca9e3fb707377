#include "pdtora/sweep.hpp"

#include <ostream>
#include <stdexcept>

#include "pdtora/numfmt.hpp"
#include "pdtora/simulator.hpp"

namespace pdtora {

SweepAxis parse_axis(std::string_view s)
{
    if (s == "speed")
        return SweepAxis::Speed;
    if (s == "nodes")
        return SweepAxis::Nodes;
    throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "' (expected speed or nodes)");
}

std::string_view to_string(SweepAxis a)
{
    return a == SweepAxis::Speed ? "speed" : "nodes";
}

std::vector<ScenarioConfig> expand_sweep(const SweepSpec &spec)
{
    if (spec.values.empty())
        throw std::invalid_argument("sweep: no axis values");
    if (spec.seeds == 0)
        throw std::invalid_argument("sweep: seeds must be >= 1");
    std::vector<ScenarioConfig> out;
    for (double v : spec.values) {
        for (Protocol p : spec.protocols) {
            for (std::uint32_t s = 1; s <= spec.seeds; ++s) {
                ScenarioConfig c = spec.base;
                if (spec.axis == SweepAxis::Speed) {
                    c.max_speed_m_s = v;
                    if (c.min_speed_m_s > v)
                        c.min_speed_m_s = v;
                } else {
                    c.num_nodes = v >= 0 ? static_cast<std::uint32_t>(v) : 0;
                }
                c.protocol = p;
                c.seed = s;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

namespace {

SweepCell run_cell(const ScenarioConfig &cfg, const RunHook &hook)
{
    SweepCell cell{cfg, {}, {}};
    try {
        validate(cfg);
        RunResult r = run(cfg);
        if (hook)
            hook(r);
        cell.report = std::move(r.report);
    } catch (const std::exception &e) {
        cell.error = e.what();
    }
    return cell;
}

} // namespace

SweepResult run_sweep_serial(const SweepSpec &spec, const RunHook &hook)
{
    SweepResult res{spec, {}};
    for (const auto &c : expand_sweep(spec))
        res.cells.push_back(run_cell(c, hook));
    return res;
}

SweepResult run_sweep(const SweepSpec &spec, const RunHook &hook)
{
    const auto configs = expand_sweep(spec);
    std::vector<SweepCell> cells(configs.size());
    const auto n = static_cast<std::int64_t>(configs.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i)
        cells[i] = run_cell(configs[i], hook);
    return SweepResult{spec, std::move(cells)};
}

std::vector<const SweepCell *> SweepResult::group(double value, Protocol p) const
{
    std::vector<const SweepCell *> out;
    for (const auto &c : cells) {
        const double v = spec.axis == SweepAxis::Speed ? c.config.max_speed_m_s : c.config.num_nodes;
        if (v == value && c.config.protocol == p && c.error.empty())
            out.push_back(&c);
    }
    return out;
}

std::vector<const SweepCell *> SweepResult::failures() const
{
    std::vector<const SweepCell *> out;
    for (const auto &c : cells)
        if (!c.error.empty())
            out.push_back(&c);
    return out;
}

RunKey run_key(const ScenarioConfig &cfg)
{
    return RunKey{cfg.protocol, std::to_string(cfg.seed), cfg.num_nodes, cfg.max_speed_m_s, cfg.pause_s};
}

std::string run_label(const ScenarioConfig &cfg)
{
    return std::string(to_string(cfg.protocol)) + "_n" + std::to_string(cfg.num_nodes) + "_v" +
           format_number(cfg.max_speed_m_s) + "_p" + format_number(cfg.pause_s) + "_s" + std::to_string(cfg.seed);
}

void write_summary_csv(std::ostream &out, const SweepResult &r)
{
    out << kSummaryHeader << '\n';
    for (const auto &c : r.cells)
        if (c.error.empty())
            out << summary_row(run_key(c.config), c.report) << '\n';
    for (double v : r.spec.values) {
        for (Protocol p : r.spec.protocols) {
            const auto g = r.group(v, p);
            if (g.empty())
                continue;
            std::vector<MetricsReport> reports;
            for (const auto *c : g)
                reports.push_back(c->report);
            RunKey k = run_key(g.front()->config);
            k.seed = "mean";
            out << mean_row(k, reports) << '\n';
        }
    }
}

} // namespace pdtora
