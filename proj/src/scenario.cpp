#include "pdtora/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "pdtora/numfmt.hpp"

namespace pdtora {

Protocol parse_protocol(std::string_view s)
{
    if (s == "tora" || s == "TORA")
        return Protocol::Tora;
    if (s == "pdtora" || s == "PDTORA")
        return Protocol::Pdtora;
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "' (expected tora|pdtora)");
}

std::string_view to_string(Protocol p)
{
    return p == Protocol::Tora ? "tora" : "pdtora";
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> fields(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ','))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

struct LineContext
{
    std::size_t line;
    std::string key;

    [[noreturn]] void fail(const std::string &what) const { throw ScenarioError(line, key, what); }

    double number(std::string_view v) const
    {
        try {
            return parse_number(v);
        } catch (const std::invalid_argument &) {
            fail("expected a number, got '" + std::string(v) + "'");
        }
    }

    std::uint64_t integer(std::string_view v) const
    {
        std::uint64_t out = 0;
        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || end != v.data() + v.size())
            fail("expected a non-negative integer, got '" + std::string(v) + "'");
        return out;
    }

    std::vector<std::string_view> tuple(std::string_view v, std::size_t n) const
    {
        auto f = fields(v);
        if (f.size() != n)
            fail("expected " + std::to_string(n) + " fields, got " + std::to_string(f.size()));
        return f;
    }
};

using Setter = std::function<void(ScenarioConfig &, std::string_view, const LineContext &)>;

template <typename T>
Setter number_into(T ScenarioConfig::*field)
{
    return [field](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
        if constexpr (std::is_integral_v<T>)
            c.*field = static_cast<T>(ctx.integer(v));
        else
            c.*field = ctx.number(v);
    };
}

const std::map<std::string, Setter, std::less<>> &setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"num_nodes", number_into(&ScenarioConfig::num_nodes)},
        {"area_x_m", number_into(&ScenarioConfig::area_x_m)},
        {"area_y_m", number_into(&ScenarioConfig::area_y_m)},
        {"area_m",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             c.area_x_m = c.area_y_m = ctx.number(v);
         }},
        {"range_m", number_into(&ScenarioConfig::range_m)},
        {"bitrate_bps", number_into(&ScenarioConfig::bitrate_bps)},
        {"max_speed_m_s", number_into(&ScenarioConfig::max_speed_m_s)},
        {"min_speed_m_s", number_into(&ScenarioConfig::min_speed_m_s)},
        {"pause_s", number_into(&ScenarioConfig::pause_s)},
        {"sim_end_ms", number_into(&ScenarioConfig::sim_end_ms)},
        {"mobility_tick_ms", number_into(&ScenarioConfig::mobility_tick_ms)},
        {"initial_energy_j", number_into(&ScenarioConfig::initial_energy_j)},
        {"tx_cost_j_per_bit", number_into(&ScenarioConfig::tx_cost_j_per_bit)},
        {"rx_cost_j_per_bit", number_into(&ScenarioConfig::rx_cost_j_per_bit)},
        {"ntt_static_ms", number_into(&ScenarioConfig::ntt_static_ms)},
        {"ntt_alpha", number_into(&ScenarioConfig::ntt_alpha)},
        {"min_power_fraction",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) { c.qos.min_power_fraction = ctx.number(v); }},
        {"max_delay_ms",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) { c.qos.max_delay_ms = ctx.number(v); }},
        {"protocol",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             try {
                 c.protocol = parse_protocol(v);
             } catch (const std::invalid_argument &e) {
                 ctx.fail(e.what());
             }
         }},
        {"seed", number_into(&ScenarioConfig::seed)},
        {"num_flows", number_into(&ScenarioConfig::num_flows)},
        {"packet_bytes", number_into(&ScenarioConfig::packet_bytes)},
        {"packet_rate_pps", number_into(&ScenarioConfig::packet_rate_pps)},
        {"flow_start_spread_ms", number_into(&ScenarioConfig::flow_start_spread_ms)},
        {"control_packet_bytes", number_into(&ScenarioConfig::control_packet_bytes)},
        {"route_required_timeout_ms", number_into(&ScenarioConfig::route_required_timeout_ms)},
        {"source_buffer_packets", number_into(&ScenarioConfig::source_buffer_packets)},
        {"source_buffer_timeout_ms", number_into(&ScenarioConfig::source_buffer_timeout_ms)},
        {"flow",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 6);
             c.flows.push_back({static_cast<NodeId>(ctx.integer(f[0])), static_cast<NodeId>(ctx.integer(f[1])),
                                ctx.number(f[2]), ctx.number(f[3]), ctx.number(f[4]), ctx.number(f[5])});
         }},
        {"position",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 3);
             c.positions[static_cast<NodeId>(ctx.integer(f[0]))] = {ctx.number(f[1]), ctx.number(f[2])};
         }},
        {"link",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 2);
             c.links.emplace_back(static_cast<NodeId>(ctx.integer(f[0])), static_cast<NodeId>(ctx.integer(f[1])));
         }},
        {"node_energy",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 2);
             c.node_energy_j[static_cast<NodeId>(ctx.integer(f[0]))] = ctx.number(f[1]);
         }},
        {"node_ntt",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 2);
             c.node_ntt_ms[static_cast<NodeId>(ctx.integer(f[0]))] = ctx.number(f[1]);
         }},
        {"move",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 4);
             c.moves.push_back({ctx.number(f[0]), static_cast<NodeId>(ctx.integer(f[1])),
                                {ctx.number(f[2]), ctx.number(f[3])}});
         }},
        {"cut",
         [](ScenarioConfig &c, std::string_view v, const LineContext &ctx) {
             auto f = ctx.tuple(v, 3);
             c.cuts.push_back({ctx.number(f[0]), static_cast<NodeId>(ctx.integer(f[1])),
                               static_cast<NodeId>(ctx.integer(f[2]))});
         }},
    };
    return table;
}

const std::set<std::string, std::less<>> &list_keys()
{
    static const std::set<std::string, std::less<>> keys = {"flow", "position", "link", "node_energy",
                                                            "node_ntt", "move", "cut"};
    return keys;
}

void require(bool ok, const char *key, const std::string &what)
{
    if (!ok)
        throw ScenarioError(0, key, what);
}

} // namespace

void validate(const ScenarioConfig &c)
{
    require(c.num_nodes >= 1, "num_nodes", "must be at least 1");
    require(c.area_x_m > 0 && c.area_y_m > 0, "area_m", "must be positive");
    require(c.range_m >= 0, "range_m", "must be non-negative");
    require(c.bitrate_bps > 0, "bitrate_bps", "must be positive");
    require(c.max_speed_m_s >= 0, "max_speed_m_s", "must be non-negative");
    require(c.min_speed_m_s >= 0, "min_speed_m_s", "must be non-negative");
    require(c.pause_s >= 0, "pause_s", "must be non-negative");
    require(c.sim_end_ms > 0, "sim_end_ms", "must be positive");
    require(c.mobility_tick_ms > 0, "mobility_tick_ms", "must be positive");
    require(c.initial_energy_j > 0, "initial_energy_j", "must be positive");
    require(c.tx_cost_j_per_bit >= 0, "tx_cost_j_per_bit", "must be non-negative");
    require(c.rx_cost_j_per_bit >= 0, "rx_cost_j_per_bit", "must be non-negative");
    require(c.ntt_static_ms >= 0, "ntt_static_ms", "must be non-negative");
    require(c.ntt_alpha >= 0 && c.ntt_alpha <= 1, "ntt_alpha", "must lie in [0,1]");
    require(c.qos.min_power_fraction >= 0 && c.qos.min_power_fraction <= 1, "min_power_fraction",
            "must lie in [0,1]");
    require(c.qos.max_delay_ms >= 0 && std::isfinite(c.qos.max_delay_ms), "max_delay_ms",
            "must be finite and non-negative");
    require(c.packet_bytes > 0, "packet_bytes", "must be positive");
    require(c.packet_rate_pps > 0, "packet_rate_pps", "must be positive");
    require(c.flow_start_spread_ms >= 0, "flow_start_spread_ms", "must be non-negative");
    require(c.control_packet_bytes > 0, "control_packet_bytes", "must be positive");
    require(c.route_required_timeout_ms > 0, "route_required_timeout_ms", "must be positive");
    require(c.source_buffer_timeout_ms >= 0, "source_buffer_timeout_ms", "must be non-negative");
    if (c.flows.empty())
        require(c.num_flows <= static_cast<std::uint64_t>(c.num_nodes) * (c.num_nodes - 1), "num_flows",
                "more flows than distinct node pairs");

    auto node_ok = [&](NodeId n) { return n < c.num_nodes; };
    for (const auto &f : c.flows) {
        require(node_ok(f.src) && node_ok(f.dst), "flow", "node id out of range");
        require(f.src != f.dst, "flow", "src and dst must differ");
        require(f.interval_ms > 0, "flow", "interval must be positive");
        require(f.packet_bits > 0, "flow", "packet size must be positive");
    }
    for (const auto &[n, p] : c.positions) {
        require(node_ok(n), "position", "node id out of range");
        require(p.x >= 0 && p.x <= c.area_x_m && p.y >= 0 && p.y <= c.area_y_m, "position", "outside the area");
    }
    for (const auto &[a, b] : c.links)
        require(node_ok(a) && node_ok(b) && a != b, "link", "bad endpoints");
    for (const auto &[n, e] : c.node_energy_j)
        require(node_ok(n) && e >= 0 && e <= c.initial_energy_j, "node_energy", "must lie in [0, initial_energy_j]");
    for (const auto &[n, t] : c.node_ntt_ms)
        require(node_ok(n) && t >= 0, "node_ntt", "bad node or negative ntt");
    for (const auto &m : c.moves) {
        require(node_ok(m.node), "move", "node id out of range");
        require(m.to.x >= 0 && m.to.x <= c.area_x_m && m.to.y >= 0 && m.to.y <= c.area_y_m, "move",
                "outside the area");
    }
    for (const auto &cut : c.cuts) {
        require(!c.links.empty(), "cut", "only valid with an explicit link list");
        require(node_ok(cut.a) && node_ok(cut.b), "cut", "node id out of range");
    }
}

ScenarioConfig parse_scenario(std::string_view text)
{
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ScenarioError(line_no, std::string(line), "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ScenarioError(line_no, key, "unknown key");
        if (value.empty())
            throw ScenarioError(line_no, key, "missing value");
        if (!list_keys().contains(key) && !seen.insert(key).second)
            throw ScenarioError(line_no, key, "duplicate key");
        it->second(cfg, value, LineContext{line_no, key});
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(0, path, "cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioConfig &c)
{
    std::ostringstream o;
    auto kv = [&](const char *k, double v) { o << k << " = " << format_number(v) << '\n'; };
    kv("num_nodes", c.num_nodes);
    kv("area_x_m", c.area_x_m);
    kv("area_y_m", c.area_y_m);
    kv("range_m", c.range_m);
    kv("bitrate_bps", c.bitrate_bps);
    kv("max_speed_m_s", c.max_speed_m_s);
    kv("min_speed_m_s", c.min_speed_m_s);
    kv("pause_s", c.pause_s);
    kv("sim_end_ms", c.sim_end_ms);
    kv("mobility_tick_ms", c.mobility_tick_ms);
    kv("initial_energy_j", c.initial_energy_j);
    kv("tx_cost_j_per_bit", c.tx_cost_j_per_bit);
    kv("rx_cost_j_per_bit", c.rx_cost_j_per_bit);
    kv("ntt_static_ms", c.ntt_static_ms);
    kv("ntt_alpha", c.ntt_alpha);
    kv("min_power_fraction", c.qos.min_power_fraction);
    kv("max_delay_ms", c.qos.max_delay_ms);
    o << "protocol = " << to_string(c.protocol) << '\n';
    o << "seed = " << c.seed << '\n';
    kv("num_flows", c.num_flows);
    kv("packet_bytes", c.packet_bytes);
    kv("packet_rate_pps", c.packet_rate_pps);
    kv("flow_start_spread_ms", c.flow_start_spread_ms);
    kv("control_packet_bytes", c.control_packet_bytes);
    kv("route_required_timeout_ms", c.route_required_timeout_ms);
    kv("source_buffer_packets", c.source_buffer_packets);
    kv("source_buffer_timeout_ms", c.source_buffer_timeout_ms);
    for (const auto &f : c.flows)
        o << "flow = " << f.src << ' ' << f.dst << ' ' << format_number(f.packet_bits) << ' '
          << format_number(f.interval_ms) << ' ' << format_number(f.start_ms) << ' ' << format_number(f.stop_ms)
          << '\n';
    for (const auto &[n, p] : c.positions)
        o << "position = " << n << ' ' << format_number(p.x) << ' ' << format_number(p.y) << '\n';
    for (const auto &[a, b] : c.links)
        o << "link = " << a << ' ' << b << '\n';
    for (const auto &[n, e] : c.node_energy_j)
        o << "node_energy = " << n << ' ' << format_number(e) << '\n';
    for (const auto &[n, t] : c.node_ntt_ms)
        o << "node_ntt = " << n << ' ' << format_number(t) << '\n';
    for (const auto &m : c.moves)
        o << "move = " << format_number(m.at_ms) << ' ' << m.node << ' ' << format_number(m.to.x) << ' '
          << format_number(m.to.y) << '\n';
    for (const auto &cut : c.cuts)
        o << "cut = " << format_number(cut.at_ms) << ' ' << cut.a << ' ' << cut.b << '\n';
    return o.str();
}

std::vector<Flow> effective_flows(const ScenarioConfig &c)
{
    if (!c.flows.empty())
        return c.flows;
    std::vector<Flow> out;
    if (c.num_nodes < 2)
        return out;
    // Separate stream from mobility so traffic does not shift when the
    // mobility model consumes a different number of draws.
    std::seed_seq seq{c.seed, std::uint64_t{0x7a11f1c5}};
    Rng rng(seq);
    std::uniform_int_distribution<NodeId> pick(0, c.num_nodes - 1);
    std::uniform_real_distribution<double> start(0.0, c.flow_start_spread_ms);
    std::set<std::pair<NodeId, NodeId>> used;
    while (out.size() < c.num_flows) {
        const NodeId s = pick(rng);
        const NodeId d = pick(rng);
        if (s == d || !used.insert({s, d}).second)
            continue;
        const TimeMs t0 = c.flow_start_spread_ms > 0 ? start(rng) : 0.0;
        out.push_back({s, d, c.packet_bytes * 8.0, 1000.0 / c.packet_rate_pps, t0, c.sim_end_ms});
    }
    return out;
}

} // namespace pdtora
