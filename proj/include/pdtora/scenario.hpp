#ifndef PDTORA_SCENARIO_HPP
#define PDTORA_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdtora/mobility.hpp"
#include "pdtora/qos.hpp"
#include "pdtora/types.hpp"

namespace pdtora {

/// Constant-bit-rate flow.
struct Flow
{
    NodeId src = 0;
    NodeId dst = 0;
    double packet_bits = 4096.0;
    TimeMs interval_ms = 250.0;
    TimeMs start_ms = 0.0;
    TimeMs stop_ms = 0.0;

    bool operator==(const Flow &) const = default;
};

struct ScriptedMove
{
    TimeMs at_ms = 0.0;
    NodeId node = 0;
    Vec2 to;

    bool operator==(const ScriptedMove &) const = default;
};

struct ScriptedCut
{
    TimeMs at_ms = 0.0;
    NodeId a = 0;
    NodeId b = 0;

    bool operator==(const ScriptedCut &) const = default;
};

struct ScenarioConfig
{
    std::uint32_t num_nodes = 50;
    double area_x_m = 670.0;
    double area_y_m = 670.0;
    double range_m = 250.0;
    double bitrate_bps = 2.0e6;
    double max_speed_m_s = 20.0;
    double min_speed_m_s = 1.0;
    double pause_s = 10.0;
    TimeMs sim_end_ms = 100000.0;
    TimeMs mobility_tick_ms = 100.0;

    double initial_energy_j = 20.0;
    double tx_cost_j_per_bit = 1.0e-6;
    double rx_cost_j_per_bit = 0.5e-6;

    TimeMs ntt_static_ms = 10.0;
    double ntt_alpha = 0.0; // 0 keeps the static value
    QosConstraint qos{0.2, 250.0};
    Protocol protocol = Protocol::Pdtora;
    std::uint64_t seed = 1;

    // Generated workload, used when no explicit flow is listed.
    std::uint32_t num_flows = 20;
    double packet_bytes = 512.0;
    double packet_rate_pps = 16.0;
    TimeMs flow_start_spread_ms = 1000.0;

    double control_packet_bytes = 32.0;
    TimeMs route_required_timeout_ms = 1000.0;
    std::uint32_t source_buffer_packets = 64;
    TimeMs source_buffer_timeout_ms = 30000.0;

    std::vector<Flow> flows;
    std::map<NodeId, Vec2> positions;
    std::vector<std::pair<NodeId, NodeId>> links; // non-empty: fixed topology, geometry ignored
    std::map<NodeId, double> node_energy_j;       // residual at t=0
    std::map<NodeId, TimeMs> node_ntt_ms;
    std::vector<ScriptedMove> moves;
    std::vector<ScriptedCut> cuts;

    bool operator==(const ScenarioConfig &) const = default;

    MobilityParams mobility() const
    {
        return {area_x_m, area_y_m, min_speed_m_s, max_speed_m_s, pause_s * 1000.0};
    }
};

class ScenarioError : public std::runtime_error
{
public:
    ScenarioError(std::size_t line, std::string key, const std::string &what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + key + ": " + what : key + ": " + what),
          m_line(line), m_key(std::move(key))
    {
    }

    std::size_t line() const { return m_line; }
    const std::string &key() const { return m_key; }

private:
    std::size_t m_line;
    std::string m_key;
};

/// Flat "key = value" text, '#' starts a comment. Missing keys keep their
/// defaults; unknown keys and out-of-range values throw ScenarioError.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::string &path);

std::string serialize_scenario(const ScenarioConfig &cfg);

/// Range and consistency checks shared by the parser and the simulator.
void validate(const ScenarioConfig &cfg);

/// Flows the run will actually use: the explicit list, or num_flows CBR
/// flows between distinct random (src, dst) pairs drawn from the seed.
std::vector<Flow> effective_flows(const ScenarioConfig &cfg);

} // namespace pdtora

#endif
