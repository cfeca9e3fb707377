// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed below; nothing here is tuned per run.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdtora/numfmt.hpp"
#include "pdtora/qos.hpp"
#include "pdtora/simulator.hpp"
#include "pdtora/sweep.hpp"

namespace fs = std::filesystem;
using namespace pdtora;

namespace {

constexpr double kMinPower = 0.2;
constexpr double kMaxDelayMs = 250.0;
constexpr double kAlpha = 0.05;
constexpr std::uint32_t kSeeds = 10;
constexpr double kLoopSuiteLimitS = 60.0;
constexpr double kSpeedSweepLimitS = 600.0;

using Clock = std::chrono::steady_clock;
using Links = std::vector<std::pair<NodeId, NodeId>>;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v)
{
    return format_number(v);
}

struct Verdict
{
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Verdict> g_verdicts;

void report(int id, std::string name, bool pass, std::string detail)
{
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail << std::endl;
    g_verdicts.push_back({id, std::move(name), pass, std::move(detail)});
}

// Audits collected from every run the suite performs.
struct AuditTotals
{
    std::mutex mu;
    std::size_t traces = 0;
    std::size_t qry_admissions = 0;
    std::size_t qry_transmissions = 0;
    std::size_t budget = 0;
    std::size_t power = 0;
    std::size_t dead = 0;
    std::size_t sweep_traces = 0;
    std::size_t sweep_power = 0;
    std::vector<std::string> examples;

    void add(const TraceLog &t, Protocol p, bool from_sweep)
    {
        const auto rep = audit_trace(t, p == Protocol::Pdtora);
        std::lock_guard lock(mu);
        ++traces;
        qry_admissions += rep.qry_admissions;
        qry_transmissions += rep.qry_transmissions;
        budget += rep.budget_violations.size();
        power += rep.power_violations.size();
        dead += rep.dead_node_violations.size();
        if (from_sweep) {
            ++sweep_traces;
            sweep_power += rep.power_violations.size();
        }
        for (const auto *v : {&rep.budget_violations, &rep.power_violations, &rep.dead_node_violations})
            for (const auto &line : *v)
                if (examples.size() < 5)
                    examples.push_back(line);
    }
};

AuditTotals g_audit;

ScenarioConfig fixed_topology(std::uint32_t n, Links links, Protocol p)
{
    ScenarioConfig c;
    c.num_nodes = n;
    c.links = std::move(links);
    c.max_speed_m_s = 0.0;
    c.min_speed_m_s = 0.0;
    c.protocol = p;
    c.num_flows = 0;
    return c;
}

bool connected(std::uint32_t n, const Links &links)
{
    std::vector<std::vector<NodeId>> adj(n);
    for (auto [a, b] : links) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

// ---- 1: loop freedom --------------------------------------------------------

struct DagStats
{
    std::size_t destinations = 0;
    std::size_t cycles = 0;
    std::size_t stranded = 0; // non-destination with a height and no downstream
    std::size_t stale = 0;    // neighbor entry disagreeing with the neighbor's height
};

// Edges are what each node believes: u -> v when v is a live neighbor whose
// last advertised height is below u's own.
void check_dags(const RunResult &r, DagStats &st)
{
    const auto &nodes = r.nodes;
    const std::uint32_t n = static_cast<std::uint32_t>(nodes.size());
    std::set<NodeId> dsts;
    for (const auto &s : nodes)
        for (const auto &[dst, ds] : s.dests)
            if (ds.height)
                dsts.insert(dst);
    for (NodeId dst : dsts) {
        ++st.destinations;
        std::vector<std::vector<NodeId>> out(n);
        std::vector<std::size_t> indeg(n, 0);
        for (NodeId u = 0; u < n; ++u) {
            const auto *ds = nodes[u].find_dest(dst);
            if (!ds || !ds->height)
                continue;
            for (const auto &[v, route] : ds->neighbors) {
                if (!r.links.linked(u, v))
                    continue;
                if (route.height < *ds->height) {
                    out[u].push_back(v);
                    ++indeg[v];
                }
            }
            if (u != dst && out[u].empty())
                ++st.stranded;
            for (NodeId v : r.links.neighbors(u)) {
                const auto *vs = nodes[v].find_dest(dst);
                const MaybeHeight actual = vs ? vs->height : MaybeHeight{};
                const auto it = ds->neighbors.find(v);
                const MaybeHeight believed = it == ds->neighbors.end() ? MaybeHeight{} : it->second.height;
                if (actual != believed)
                    ++st.stale;
            }
        }
        // Kahn: a cycle leaves nodes that never reach indegree zero.
        std::vector<NodeId> ready;
        for (NodeId u = 0; u < n; ++u)
            if (indeg[u] == 0)
                ready.push_back(u);
        std::size_t removed = 0;
        while (!ready.empty()) {
            const NodeId u = ready.back();
            ready.pop_back();
            ++removed;
            for (NodeId v : out[u])
                if (--indeg[v] == 0)
                    ready.push_back(v);
        }
        if (removed != n)
            ++st.cycles;
    }
}

void criterion_loop_freedom()
{
    const auto t0 = Clock::now();
    std::seed_seq sseq{0x6c6f6f70u, 1u};
    std::mt19937_64 rng(sseq);
    DagStats st;
    std::size_t runs = 0;
    for (int topo = 0; topo < 200; ++topo) {
        const auto n = std::uniform_int_distribution<std::uint32_t>(5, 50)(rng);
        const double side = 110.0 * std::sqrt(static_cast<double>(n));
        std::uniform_real_distribution<double> coord(0.0, side);
        ScenarioConfig base;
        base.num_nodes = n;
        base.area_x_m = base.area_y_m = side;
        base.max_speed_m_s = base.min_speed_m_s = 0.0;
        base.num_flows = 0;
        base.sim_end_ms = 8000.0;
        base.source_buffer_timeout_ms = 3000.0;
        for (NodeId i = 0; i < n; ++i)
            base.positions[i] = {coord(rng), coord(rng)};
        std::uniform_int_distribution<NodeId> pick(0, n - 1);
        std::set<std::pair<NodeId, NodeId>> pairs;
        while (pairs.size() < 8) {
            const NodeId s = pick(rng), d = pick(rng);
            if (s != d)
                pairs.insert({s, d});
        }
        for (auto [s, d] : pairs) {
            const double start = std::uniform_real_distribution<double>(0.0, 500.0)(rng);
            base.flows.push_back({s, d, 4096.0, 250.0, start, 2000.0});
        }
        for (Protocol p : {Protocol::Tora, Protocol::Pdtora}) {
            auto cfg = base;
            cfg.protocol = p;
            cfg.seed = static_cast<std::uint64_t>(topo) + 1;
            const auto r = run(cfg);
            g_audit.add(r.trace, p, false);
            check_dags(r, st);
            ++runs;
        }
    }
    const double secs = seconds_since(t0);
    report(1, "loop-freedom", st.cycles == 0 && secs < kLoopSuiteLimitS,
           std::to_string(runs) + " runs on 200 static topologies (5-50 nodes), " + std::to_string(st.destinations) +
               " destination DAGs, " + std::to_string(st.cycles) + " with a cycle (limit 0); " + num(secs) +
               " s (limit 60 s). info: stranded heights " + std::to_string(st.stranded) + ", stale neighbor entries " +
               std::to_string(st.stale));
}

// ---- 2: QoS admission oracle -------------------------------------------------

struct QosCase
{
    std::uint32_t n;
    Links links;
    std::vector<double> residual; // fraction of initial charge
    std::vector<double> ntt_ms;
};

bool path_feasible(const QosCase &c, const std::vector<NodeId> &path)
{
    if (path.size() <= 2)
        return true;
    std::vector<double> power, ntt;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        power.push_back(c.residual[path[i]]);
        ntt.push_back(c.ntt_ms[path[i]]);
    }
    return compose_metric(MetricKind::Concave, power) >= kMinPower &&
           compose_metric(MetricKind::Additive, ntt) <= kMaxDelayMs;
}

// Brute force: every simple path from 0 to n-1.
bool feasible_path_exists(const QosCase &c)
{
    std::vector<std::vector<NodeId>> adj(c.n);
    for (auto [a, b] : c.links) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    const NodeId dst = c.n - 1;
    std::vector<NodeId> path{0};
    std::vector<bool> on(c.n, false);
    on[0] = true;
    std::function<bool(NodeId)> dfs = [&](NodeId u) {
        if (u == dst)
            return path_feasible(c, path);
        for (NodeId v : adj[u]) {
            if (on[v])
                continue;
            on[v] = true;
            path.push_back(v);
            const bool ok = dfs(v);
            path.pop_back();
            on[v] = false;
            if (ok)
                return true;
        }
        return false;
    };
    return dfs(0);
}

struct QosOutcome
{
    bool formed = false;
    bool walked_ok = false; // the path data would take satisfies both bounds
};

QosOutcome run_qos_case(const QosCase &c)
{
    auto cfg = fixed_topology(c.n, c.links, Protocol::Pdtora);
    cfg.tx_cost_j_per_bit = 0.0; // residuals stay what the oracle saw
    cfg.rx_cost_j_per_bit = 0.0;
    cfg.sim_end_ms = 3000.0;
    for (NodeId i = 0; i < c.n; ++i) {
        cfg.node_energy_j[i] = c.residual[i] * cfg.initial_energy_j;
        cfg.node_ntt_ms[i] = c.ntt_ms[i];
    }
    const NodeId dst = c.n - 1;
    cfg.flows.push_back({0, dst, 4096.0, 1000.0, 0.0, 1.0});
    Simulator sim(cfg);
    sim.run_until(cfg.sim_end_ms);
    QosOutcome o;
    o.formed = sim.protocol().next_hop(sim.node(0), dst).has_value();
    if (o.formed) {
        std::vector<NodeId> path{0};
        std::set<NodeId> seen{0};
        NodeId at = 0;
        while (at != dst) {
            const auto next = sim.protocol().next_hop(sim.node(at), dst);
            if (!next || !seen.insert(*next).second)
                break;
            path.push_back(*next);
            at = *next;
        }
        o.walked_ok = at == dst && path_feasible(c, path);
    }
    g_audit.add(sim.finish().trace, Protocol::Pdtora, false);
    return o;
}

void criterion_qos_oracle()
{
    std::seed_seq sseq{0x716f73u, 2u};
    std::mt19937_64 rng(sseq);
    const std::vector<double> residuals{0.05, 0.19, 0.2, 0.21, 0.5, 1.0};
    const std::vector<double> ntts{0.0, 10.0, 60.0, 100.0, 125.0, 130.0, 249.0};
    auto assign = [&](QosCase &c) {
        c.residual.resize(c.n);
        c.ntt_ms.resize(c.n);
        for (NodeId i = 0; i < c.n; ++i) {
            c.residual[i] = residuals[std::uniform_int_distribution<std::size_t>(0, residuals.size() - 1)(rng)];
            c.ntt_ms[i] = ntts[std::uniform_int_distribution<std::size_t>(0, ntts.size() - 1)(rng)];
        }
    };

    std::vector<QosCase> cases;
    // Every labeled connected graph on 2..5 nodes, source 0, destination n-1.
    for (std::uint32_t n = 2; n <= 5; ++n) {
        Links all;
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b)
                all.push_back({a, b});
        const int repeats = n <= 4 ? 4 : 1;
        for (std::uint32_t mask = 1; mask < (1u << all.size()); ++mask) {
            Links links;
            for (std::size_t i = 0; i < all.size(); ++i)
                if (mask & (1u << i))
                    links.push_back(all[i]);
            if (!connected(n, links))
                continue;
            for (int k = 0; k < repeats; ++k) {
                QosCase c{n, links, {}, {}};
                assign(c);
                cases.push_back(std::move(c));
            }
        }
    }
    const std::size_t exhaustive = cases.size();
    // Random connected graphs on 6..8 nodes.
    for (std::uint32_t n = 6; n <= 8; ++n) {
        int made = 0;
        while (made < 400) {
            const double p = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
            Links links;
            for (NodeId a = 0; a < n; ++a)
                for (NodeId b = a + 1; b < n; ++b)
                    if (std::bernoulli_distribution(p)(rng))
                        links.push_back({a, b});
            if (!connected(n, links))
                continue;
            QosCase c{n, links, {}, {}};
            assign(c);
            cases.push_back(std::move(c));
            ++made;
        }
    }

    std::size_t formed = 0, unsound = 0, missed = 0, feasible = 0, walked_bad = 0;
    for (const auto &c : cases) {
        const bool exists = feasible_path_exists(c);
        const auto o = run_qos_case(c);
        feasible += exists;
        formed += o.formed;
        if (o.formed && !exists)
            ++unsound;
        if (!o.formed && exists)
            ++missed;
        if (o.formed && !o.walked_ok)
            ++walked_bad;
    }
    report(2, "QoS admission oracle", unsound == 0,
           std::to_string(cases.size()) + " topologies (" + std::to_string(exhaustive) +
               " from all connected labeled graphs on 2-5 nodes, 1200 random on 6-8); oracle feasible " +
               std::to_string(feasible) + ", route formed " + std::to_string(formed) +
               ", formed without a feasible path " + std::to_string(unsound) + " (limit 0). info: feasible but no "
               "route " + std::to_string(missed) + ", data path itself outside the bounds " +
               std::to_string(walked_bad));
}

// ---- 3: budget accounting ----------------------------------------------------

void criterion_budget_accounting(std::size_t &chain_runs, std::size_t &chain_bad, std::string &chain_note)
{
    std::seed_seq sseq{0x627564u, 3u};
    std::mt19937_64 rng(sseq);
    const std::vector<double> ntts{0.1, 2.7, 10.0, 33.3, 7.0 / 3.0, 61.25};
    auto check_chain = [&](std::uint32_t n, const std::vector<double> &ntt) {
        Links links;
        for (NodeId i = 0; i + 1 < n; ++i)
            links.push_back({i, i + 1});
        auto cfg = fixed_topology(n, links, Protocol::Pdtora);
        cfg.sim_end_ms = 3000.0;
        for (NodeId i = 0; i < n; ++i)
            cfg.node_ntt_ms[i] = ntt[i];
        const NodeId dst = n - 1;
        cfg.flows.push_back({0, dst, 4096.0, 1000.0, 0.0, 1.0});
        Simulator sim(cfg);
        sim.run_until(cfg.sim_end_ms);
        // The advertisement is built from the destination outwards.
        std::vector<double> path_ntt;
        for (NodeId i = dst - 1; i >= 1; --i)
            path_ntt.push_back(ntt[i]);
        const double expect = path_ntt.empty() ? 0.0 : compose_metric(MetricKind::Additive, path_ntt);
        const auto *ds = sim.node(0).find_dest(dst);
        const bool ok = ds && ds->neighbors.contains(1) && ds->neighbors.at(1).delay_ms == expect;
        ++chain_runs;
        if (!ok) {
            ++chain_bad;
            if (chain_note.empty())
                chain_note = "chain n=" + std::to_string(n) + " expected " + num(expect);
        }
        g_audit.add(sim.finish().trace, Protocol::Pdtora, false);
        return ok ? expect : -1.0;
    };
    const double seven = check_chain(7, std::vector<double>(7, 10.0));
    if (seven != 50.0 && chain_note.empty())
        chain_note = "7-node chain gave " + num(seven);
    for (int k = 0; k < 60; ++k) {
        const auto n = std::uniform_int_distribution<std::uint32_t>(2, 12)(rng);
        std::vector<double> ntt(n);
        for (auto &v : ntt)
            v = ntts[std::uniform_int_distribution<std::size_t>(0, ntts.size() - 1)(rng)];
        check_chain(n, ntt);
    }
}

// ---- 9: partition handling -----------------------------------------------------

struct PartitionCase
{
    std::string name;
    std::uint32_t n;
    Links links;
    NodeId dst;
    std::vector<NodeId> sources;
    ScriptedCut cut;
    std::set<NodeId> severed;
};

struct PartitionOutcome
{
    bool nulled = true;
    bool bounded = true;
    bool detected = false;
    std::size_t clr_tx = 0;
    std::string scenario;
};

PartitionOutcome run_partition(const PartitionCase &pc, Protocol p)
{
    auto cfg = fixed_topology(pc.n, pc.links, p);
    cfg.sim_end_ms = 10000.0;
    for (NodeId s : pc.sources)
        cfg.flows.push_back({s, pc.dst, 4096.0, 250.0, 0.0, cfg.sim_end_ms});
    cfg.cuts.push_back(pc.cut);
    const auto r = run(cfg);
    g_audit.add(r.trace, p, false);
    PartitionOutcome o;
    o.scenario = serialize_scenario(cfg);
    for (NodeId u : pc.severed) {
        const auto *ds = r.nodes[u].find_dest(pc.dst);
        if (ds && ds->height)
            o.nulled = false;
    }
    std::map<std::tuple<NodeId, NodeId, std::string>, int> clr;
    for (const auto &rec : r.trace.records()) {
        if (rec.event == "partition" && rec.dst == pc.dst)
            o.detected = true;
        if (rec.event == "tx" && rec.packet_kind == "CLR") {
            ++o.clr_tx;
            if (++clr[{rec.node, rec.dst.value_or(0), std::string(rec.field("level").value_or(""))}] > 1)
                o.bounded = false;
        }
    }
    return o;
}

void criterion_partition()
{
    std::vector<PartitionCase> cases;
    // Component {0,1,4,5} hangs off the destination through 5-6 only.
    cases.push_back({"bridge7", 7, {{0, 1}, {0, 4}, {1, 5}, {4, 5}, {5, 6}, {2, 6}, {3, 2}}, 6, {0, 3},
                     {3000.0, 5, 6}, {0, 1, 4, 5}});
    // Two-node component {5,6} cut from destination 7.
    cases.push_back({"pair", 8, {{0, 1}, {1, 7}, {2, 1}, {3, 2}, {4, 7}, {5, 6}, {6, 7}}, 7, {5, 3},
                     {2000.0, 6, 7}, {5, 6}});
    std::seed_seq sseq{0x636c72u, 9u};
    std::mt19937_64 rng(sseq);
    auto random_cluster = [&](NodeId first, std::uint32_t size, Links &links) {
        for (NodeId i = 1; i < size; ++i) // random spanning tree plus extras
            links.push_back({first + std::uniform_int_distribution<NodeId>(0, i - 1)(rng), first + i});
        for (NodeId a = 0; a < size; ++a)
            for (NodeId b = a + 2; b < size; ++b)
                if (std::bernoulli_distribution(0.25)(rng) &&
                    std::find(links.begin(), links.end(), std::pair{first + a, first + b}) == links.end())
                    links.push_back({first + a, first + b});
    };
    for (int k = 0; k < 200; ++k) {
        const auto na = std::uniform_int_distribution<std::uint32_t>(2, 8)(rng);
        const auto nb = std::uniform_int_distribution<std::uint32_t>(2, 8)(rng);
        PartitionCase pc;
        pc.name = "random" + std::to_string(k);
        pc.n = na + nb;
        random_cluster(0, na, pc.links);
        random_cluster(na, nb, pc.links);
        const NodeId a = std::uniform_int_distribution<NodeId>(0, na - 1)(rng);
        const NodeId b = std::uniform_int_distribution<NodeId>(na, na + nb - 1)(rng);
        pc.links.push_back({a, b});
        pc.dst = std::uniform_int_distribution<NodeId>(na, na + nb - 1)(rng);
        pc.sources.push_back(std::uniform_int_distribution<NodeId>(0, na - 1)(rng));
        NodeId other;
        do
            other = std::uniform_int_distribution<NodeId>(na, na + nb - 1)(rng);
        while (other == pc.dst);
        pc.sources.push_back(other);
        pc.cut = {std::uniform_real_distribution<double>(2000.0, 3000.0)(rng), a, b};
        for (NodeId i = 0; i < na; ++i)
            pc.severed.insert(i);
        cases.push_back(std::move(pc));
    }
    std::size_t runs = 0, not_null = 0, unbounded = 0, undetected = 0, clr_tx = 0;
    std::string first_bad, first_bad_scenario;
    for (const auto &pc : cases)
        for (Protocol p : {Protocol::Tora, Protocol::Pdtora}) {
            const auto o = run_partition(pc, p);
            ++runs;
            clr_tx += o.clr_tx;
            not_null += !o.nulled;
            unbounded += !o.bounded;
            undetected += !o.detected;
            if ((!o.nulled || !o.bounded) && first_bad.empty()) {
                first_bad = pc.name + "/" + std::string(to_string(p));
                first_bad_scenario = o.scenario;
            }
        }
    report(9, "partition handling", not_null == 0 && unbounded == 0,
           std::to_string(runs) + " runs (bridge7 and two-node scripts, 200 random bridge cuts, both protocols): "
               "severed component not all Null in " + std::to_string(not_null) + ", a node repeating a CLR in " +
               std::to_string(unbounded) + " (limits 0); CLR transmissions " + std::to_string(clr_tx) +
               "; info: runs without a partition event " + std::to_string(undetected) +
               (first_bad.empty() ? "" : "; first failure " + first_bad));
    if (!first_bad.empty())
        std::cout << "  failing scenario:\n" << first_bad_scenario;
}

// ---- 4-7, 10: sweeps -------------------------------------------------------------

double tx_delay_ms(const ScenarioConfig &c)
{
    return c.packet_bytes * 8.0 / c.bitrate_bps * 1000.0;
}

// One-sided paired t-test for mean(b - a) > 0.
double paired_t_p(const std::vector<double> &a, const std::vector<double> &b)
{
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = b[i] - a[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : d)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0)
        return mean > 0.0 ? 0.0 : 1.0;
    const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(static_cast<double>(n - 1));
    return boost::math::cdf(boost::math::complement(dist, t));
}

struct SweepRun
{
    SweepResult result;
    double seconds = 0.0;
};

SweepRun timed_sweep(const SweepSpec &spec)
{
    const auto t0 = Clock::now();
    SweepRun s;
    s.result = run_sweep(spec, [](const RunResult &r) { g_audit.add(r.trace, r.scenario.protocol, true); });
    s.seconds = seconds_since(t0);
    return s;
}

std::vector<double> per_seed(const SweepResult &r, double value, Protocol p,
                             const std::function<double(const MetricsReport &)> &get)
{
    std::vector<double> out;
    for (const auto *cell : r.group(value, p))
        out.push_back(get(cell->report));
    return out;
}

void criteria_sweeps()
{
    SweepSpec speed_spec;
    speed_spec.axis = SweepAxis::Speed;
    for (int v = 10; v <= 100; v += 10)
        speed_spec.values.push_back(v);
    speed_spec.seeds = kSeeds;
    const auto speed = timed_sweep(speed_spec);

    SweepSpec nodes;
    nodes.axis = SweepAxis::Nodes;
    nodes.values = {10, 20, 30, 40, 50};
    nodes.seeds = kSeeds;
    const auto by_nodes = timed_sweep(nodes);

    std::size_t failed = speed.result.failures().size() + by_nodes.result.failures().size();

    // 4: power gate
    report(4, "power gate audit", g_audit.power == 0 && g_audit.traces > 0 && failed == 0,
           std::to_string(g_audit.sweep_power) + " violations in " + std::to_string(g_audit.sweep_traces) +
               " sweep traces, " + std::to_string(g_audit.power) + " in all " + std::to_string(g_audit.traces) +
               " traces of this suite (limit 0); " + std::to_string(g_audit.qry_admissions) + " QRY admissions and " +
               std::to_string(g_audit.qry_transmissions) + " QRY transmissions checked; failed runs " +
               std::to_string(failed));

    // 5: delivery ratio trend
    {
        bool ok = true;
        std::string detail;
        for (double v : {10.0, 20.0, 100.0}) {
            const auto pdr = [](const MetricsReport &m) { return m.pdr; };
            const auto t = per_seed(speed.result, v, Protocol::Tora, pdr);
            const auto p = per_seed(speed.result, v, Protocol::Pdtora, pdr);
            if (t.size() < kSeeds || p.size() != t.size()) {
                ok = false;
                detail += "speed " + num(v) + ": missing runs; ";
                continue;
            }
            const double mt = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
            const double mp = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
            const double pv = paired_t_p(t, p);
            ok = ok && mp >= mt && pv < kAlpha;
            char buf[160];
            std::snprintf(buf, sizeof buf, "v=%g TORA %.4f PDTORA %.4f (%+.2f%%) p=%.2g; ", v, mt, mp,
                          (mp - mt) * 100.0, pv);
            detail += buf;
        }
        report(5, "delivery ratio trend", ok,
               detail + "one-sided paired t-test over " + std::to_string(kSeeds) + " seeds, p < 0.05 required");
    }

    // 6: delay bound, every PDTORA cell of both sweeps
    {
        std::size_t cells = 0, over = 0;
        double worst_mean = 0.0, worst_packet = 0.0, bound = 0.0;
        for (const auto *res : {&speed.result, &by_nodes.result})
            for (const auto &cell : res->cells) {
                if (cell.config.protocol != Protocol::Pdtora || !cell.error.empty())
                    continue;
                ++cells;
                bound = kMaxDelayMs + tx_delay_ms(cell.config);
                if (cell.report.avg_e2e_delay_ms) {
                    worst_mean = std::max(worst_mean, *cell.report.avg_e2e_delay_ms);
                    if (*cell.report.avg_e2e_delay_ms > bound)
                        ++over;
                }
                if (cell.report.max_e2e_delay_ms)
                    worst_packet = std::max(worst_packet, *cell.report.max_e2e_delay_ms);
            }
        report(6, "delay bound", over == 0 && cells > 0,
               std::to_string(cells) + " PDTORA runs; largest mean delay " + num(worst_mean) + " ms, limit " +
                   num(bound) + " ms (250 + one 512 B transmission); cells over " + std::to_string(over) +
                   "; info: largest single-packet delay " + num(worst_packet) + " ms");
    }

    // 7: lifetime ordering
    {
        bool ok = true;
        std::string detail;
        for (double v : {10.0, 20.0, 100.0}) {
            const auto t = speed.result.group(v, Protocol::Tora);
            const auto p = speed.result.group(v, Protocol::Pdtora);
            if (t.size() < kSeeds || p.size() != t.size()) {
                ok = false;
                detail += "speed " + num(v) + ": missing runs; ";
                continue;
            }
            std::size_t later = 0;
            double dead_t = 0.0, dead_p = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const auto ft = t[i]->report.deaths.first_death_ms();
                const auto fp = p[i]->report.deaths.first_death_ms();
                if (ft && (!fp || *fp > *ft))
                    ++later;
                dead_t += t[i]->report.deaths.dead_by(t[i]->config.sim_end_ms);
                dead_p += p[i]->report.deaths.dead_by(p[i]->config.sim_end_ms);
            }
            dead_t /= static_cast<double>(t.size());
            dead_p /= static_cast<double>(p.size());
            ok = ok && 2 * later > t.size() && dead_p < dead_t;
            detail += "v=" + num(v) + " first death later " + std::to_string(later) + "/" +
                      std::to_string(t.size()) + ", mean dead at 100 s TORA " + num(dead_t) + " PDTORA " +
                      num(dead_p) + "; ";
        }
        report(7, "lifetime ordering", ok, detail + "majority and lower mean required at every speed");
    }

    // 10: runtime
    report(10, "desk-scale runtime", speed.seconds < kSpeedSweepLimitS && speed.result.failures().empty(),
           "10 speeds x " + std::to_string(kSeeds) + " seeds x 2 protocols (" +
               std::to_string(speed.result.cells.size()) + " runs, 50 nodes, 100 s) in " + num(speed.seconds) +
               " s (limit 600 s); node sweep " + std::to_string(by_nodes.result.cells.size()) + " runs in " +
               num(by_nodes.seconds) + " s");
}

// ---- 8: determinism ----------------------------------------------------------------

std::string slurp(const fs::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Compares every file of two output directories byte for byte.
bool same_tree(const fs::path &a, const fs::path &b, std::size_t &files, std::string &why)
{
    std::set<std::string> names_a, names_b;
    for (const auto &e : fs::directory_iterator(a))
        names_a.insert(e.path().filename().string());
    for (const auto &e : fs::directory_iterator(b))
        names_b.insert(e.path().filename().string());
    if (names_a != names_b) {
        why = "file sets differ in " + a.string();
        return false;
    }
    for (const auto &name : names_a) {
        ++files;
        if (slurp(a / name) != slurp(b / name)) {
            why = name + " differs";
            return false;
        }
    }
    return true;
}

void criterion_determinism()
{
    const fs::path root = fs::temp_directory_path() / "pdtora_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream(root / "default.scn") << "# defaults\n";
    }
    const std::string cli = PDTORA_CLI;
    const std::string scn = (root / "default.scn").string();
    bool ok = true;
    std::size_t files = 0;
    std::string why;
    auto sh = [&](const std::string &cmd) {
        if (std::system((cmd + " > /dev/null").c_str()) != 0) {
            ok = false;
            why = "command failed: " + cmd;
        }
    };
    for (int rep : {1, 2}) {
        for (const char *proto : {"tora", "pdtora"}) {
            const auto dir = root / ("run_" + std::string(proto) + std::to_string(rep));
            sh(cli + " run --scenario " + scn + " --seed 7 --protocol " + proto + " --out " + dir.string());
        }
        const auto dir = root / ("sweep" + std::to_string(rep));
        sh(cli + " sweep --scenario " + scn + " --axis speed --values 10,100 --seeds 2 --traces --out " +
           dir.string());
    }
    if (ok)
        for (const char *d : {"run_tora", "run_pdtora", "sweep"})
            if (!same_tree(root / (std::string(d) + "1"), root / (std::string(d) + "2"), files, why)) {
                ok = false;
                break;
            }
    // Same run in-process: trace and summary text.
    ScenarioConfig cfg;
    cfg.seed = 11;
    const auto a = run(cfg);
    const auto b = run(cfg);
    const bool in_process =
        a.trace.to_csv() == b.trace.to_csv() && summary_row(run_key(a.scenario), a.report) ==
                                                  summary_row(run_key(b.scenario), b.report);
    ok = ok && in_process && files > 0;
    report(8, "determinism", ok,
           std::to_string(files) + " CLI output files (summary, timeline, trace; run and sweep) compared byte for "
               "byte across two invocations, in-process rerun " + (in_process ? "identical" : "DIFFERENT") +
               (why.empty() ? "" : "; " + why));
    fs::remove_all(root);
}

} // namespace

// Optional arguments pick criterion groups: loops qos budget partition sweeps
// determinism. Without arguments everything runs.
int main(int argc, char **argv)
{
    const std::set<std::string> only(argv + 1, argv + argc);
    auto wanted = [&](const char *group) { return only.empty() || only.contains(group); };
    std::cout << "pdtora acceptance suite" << std::endl;
    try {
        if (wanted("loops"))
            criterion_loop_freedom();
        if (wanted("qos"))
            criterion_qos_oracle();
        std::size_t chain_runs = 0, chain_bad = 0;
        std::string chain_note;
        if (wanted("budget"))
            criterion_budget_accounting(chain_runs, chain_bad, chain_note);
        if (wanted("partition"))
            criterion_partition();
        if (wanted("sweeps"))
            criteria_sweeps();
        if (wanted("budget"))
            report(3, "budget accounting", g_audit.budget == 0 && chain_bad == 0,
                   std::to_string(g_audit.budget) + " budget violations in " + std::to_string(g_audit.traces) +
                       " traces (" + std::to_string(g_audit.qry_admissions) + " admissions); UPD accumulated "
                       "delay != path NTT sum on " + std::to_string(chain_bad) + " of " +
                       std::to_string(chain_runs) + " static chains incl. the 7-node 50 ms chain (exact equality)" +
                       (chain_note.empty() ? "" : "; " + chain_note));
        if (wanted("determinism"))
            criterion_determinism();
    } catch (const std::exception &e) {
        std::cout << "FAIL  suite aborted: " << e.what() << std::endl;
        return 1;
    }
    for (const auto &line : g_audit.examples)
        std::cout << "  audit: " << line << '\n';

    std::sort(g_verdicts.begin(), g_verdicts.end(), [](const Verdict &a, const Verdict &b) { return a.id < b.id; });
    std::size_t passed = 0;
    std::cout << "\nsummary\n";
    for (const auto &v : g_verdicts) {
        std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << v.id << "] " << v.name << '\n';
        passed += v.pass;
    }
    std::cout << passed << "/" << g_verdicts.size() << " criteria pass" << std::endl;
    return passed == g_verdicts.size() ? 0 : 1;
}
