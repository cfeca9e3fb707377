#ifndef PDTORA_SIMULATOR_HPP
#define PDTORA_SIMULATOR_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "pdtora/metrics.hpp"
#include "pdtora/mobility.hpp"
#include "pdtora/protocol.hpp"
#include "pdtora/radio.hpp"
#include "pdtora/scenario.hpp"
#include "pdtora/trace.hpp"

namespace pdtora {

struct SimOptions
{
    bool trace_data_hops = false; // per-hop DATA tx/rx lines
    bool trace_links = true;
};

/// Per-node radio accounting, for the energy conservation audit.
struct RadioTally
{
    double tx_bits = 0.0;
    double rx_bits = 0.0;
};

struct RunResult
{
    ScenarioConfig scenario;
    TraceLog trace;
    MetricsReport report;
    std::vector<NodeState> nodes;
    std::vector<RadioTally> radio;
    std::vector<MobilityState> mobility;
    Adjacency links;
    std::map<std::uint32_t, std::uint64_t> in_flight; // per flow, counted from simulator queues
    std::uint64_t events = 0;
};

/// Single-threaded discrete-event engine. Events fire in (time, sequence)
/// order, so a run is a pure function of its scenario.
class Simulator
{
public:
    explicit Simulator(ScenarioConfig cfg, SimOptions opts = {});

    /// Processes every event with fire time <= t (capped at sim_end_ms).
    void run_until(TimeMs t);
    RunResult finish();

    TimeMs now() const { return m_now; }
    const NodeState &node(NodeId n) const { return m_nodes.at(n); }
    const std::vector<NodeState> &nodes() const { return m_nodes; }
    const Adjacency &links() const { return m_links; }
    const TraceLog &trace() const { return m_trace; }
    const ToraProtocol &protocol() const { return m_protocol; }

private:
    struct OutPacket
    {
        Packet packet;
        std::optional<TimeMs> received_at;
    };
    struct MobilityTick
    {
    };
    struct TxDone
    {
        NodeId node;
    };
    struct Enqueue
    {
        NodeId node;
        OutPacket out;
    };
    struct Delivery
    {
        NodeId to;
        NodeId from;
        Packet packet;
    };
    struct TrafficEmit
    {
        std::uint32_t flow;
    };
    struct MoveNode
    {
        std::size_t index;
    };
    struct CutLink
    {
        std::size_t index;
    };
    using Payload = std::variant<MobilityTick, TxDone, Enqueue, Delivery, TrafficEmit, MoveNode, CutLink>;

    struct Event
    {
        TimeMs at;
        std::uint64_t seq;
        Payload payload;
    };
    struct Later
    {
        bool operator()(const Event &a, const Event &b) const
        {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };

    struct Runtime
    {
        std::deque<OutPacket> mac;
        bool busy = false;
        std::map<NodeId, std::deque<DataPacket>> buffer; // awaiting a route, by destination
        std::uint64_t next_seq = 0;
    };

    void schedule(TimeMs at, Payload p);
    void dispatch(const Event &e);

    void on_tick();
    void on_tx_done(NodeId n);
    void on_enqueue(Enqueue &e);
    void on_delivery(Delivery &d);
    void on_traffic(std::uint32_t flow);
    void on_move(std::size_t index);
    void on_cut(std::size_t index);

    void apply(NodeId n, const Actions &actions, std::optional<TimeMs> received_at);
    void enqueue(NodeId n, OutPacket out);
    void start_tx(NodeId n);
    void buffer_data(NodeId n, const DataPacket &d);
    void flush_buffer(NodeId n, NodeId dst);
    void maintain_buffers();
    void kill(NodeId n);
    void recompute_links();
    void apply_link_transitions(const std::vector<LinkTransition> &changes);

    Adjacency compute_links() const;
    TimeMs processing_delay(NodeId n) const;
    double packet_bits(const Packet &p) const;
    bool expired(const DataPacket &d) const;

    void trace(NodeId n, std::string event, const Packet *p, std::string detail);
    void trace_data(NodeId n, std::string_view event, const DataPacket &d, Detail detail);
    void trace_drop(NodeId n, DropReason reason, const Packet &p);

    ScenarioConfig m_cfg;
    SimOptions m_opts;
    ToraProtocol m_protocol;
    std::vector<Flow> m_flows;
    std::vector<NodeState> m_nodes;
    std::vector<Runtime> m_rt;
    std::vector<RadioTally> m_radio;
    std::vector<MobilityState> m_mob;
    std::vector<std::uint8_t> m_alive;
    std::vector<std::pair<NodeId, NodeId>> m_fixed_links;
    Adjacency m_links;
    Rng m_mobility_rng;
    TraceLog m_trace;

    std::priority_queue<Event, std::vector<Event>, Later> m_queue;
    std::uint64_t m_seq = 0;
    std::uint64_t m_events = 0;
    TimeMs m_now = 0.0;
    bool m_mobile = false;
};

RunResult run(const ScenarioConfig &cfg, SimOptions opts = {});

} // namespace pdtora

#endif
