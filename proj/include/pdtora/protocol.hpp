#ifndef PDTORA_PROTOCOL_HPP
#define PDTORA_PROTOCOL_HPP

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

#include "pdtora/energy.hpp"
#include "pdtora/height.hpp"
#include "pdtora/packet.hpp"
#include "pdtora/qos.hpp"
#include "pdtora/types.hpp"

namespace pdtora {

enum class DropReason {
    NoRoute,
    PowerReject,
    DelayReject,
    Duplicate,
    Stale,
    DeadNode,
    LostLink,
    LostDeadNode,
};

std::string_view to_string(DropReason r);

/// What a neighbor last advertised for one destination.
struct NeighborRoute
{
    Height height;
    TimeMs delay_ms = 0.0;
};

struct SeenQuery
{
    TimeMs budget_ms = 0.0;
    TimeMs expires_ms = 0.0;
};

/// Routing state a node keeps for one destination.
struct DestinationState
{
    MaybeHeight height;
    bool route_required = false;
    bool origin = false; // this node asked for the route on its own behalf
    TimeMs rr_expires_ms = 0.0;
    TimeMs qry_budget_ms = 0.0; // best query budget seen on arrival while route_required
    std::map<NodeId, SeenQuery> qry_seen;
    std::map<NodeId, NeighborRoute> neighbors;
    TimeMs last_upd_time = -1.0;
    std::optional<TimeMs> delay_to_dst_ms;
    std::vector<ReferenceLevel> cleared_levels;

    bool route_required_active(TimeMs now) const { return route_required && now < rr_expires_ms; }
};

struct NodeState
{
    NodeId id = 0;
    std::set<NodeId> neighbors;
    std::map<NodeId, DestinationState> dests;
    NttEstimator ntt;
    EnergyState energy;
    TimeMs last_tau_issued = -1.0;

    NodeState() = default;
    NodeState(NodeId node, NttEstimator estimator, EnergyState battery)
        : id(node), ntt(estimator), energy(battery)
    {
    }

    const DestinationState *find_dest(NodeId dst) const;
};

bool has_downstream(const DestinationState &ds);
std::optional<NodeId> best_downstream(const DestinationState &ds);

// ---- actions ---------------------------------------------------------------

struct Broadcast
{
    Packet packet;
};
struct Unicast
{
    NodeId next_hop;
    Packet packet;
};
struct DropPacket
{
    DropReason reason;
    Packet packet;
};
struct DeliverData
{
    DataPacket data;
};
struct SetHeight
{
    NodeId dst;
    MaybeHeight height;
    std::string_view cause;
};
struct DetectPartition
{
    NodeId dst;
    ReferenceLevel level;
};
/// Informational: a QRY passed admission at this node.
struct QueryAdmitted
{
    QryPacket query;
    TimeMs budget_out_ms;
    TimeMs ntt_ms;
    double residual_fraction;
};

using ProtocolAction =
    std::variant<Broadcast, Unicast, DropPacket, DeliverData, SetHeight, DetectPartition, QueryAdmitted>;
using Actions = std::vector<ProtocolAction>;

struct ProtocolConfig
{
    bool qos_enabled = true;
    TimeMs route_required_timeout_ms = 1000.0;
    double relay_min_power_fraction = 0.2; // below this a PDTORA node stops relaying
};

/// TORA / PDTORA node logic. Handlers mutate only the NodeState they are
/// given and describe every externally visible effect as actions.
class ToraProtocol
{
public:
    explicit ToraProtocol(ProtocolConfig cfg = {}) : m_cfg(cfg) {}

    const ProtocolConfig &config() const { return m_cfg; }

    Actions initiate_route(NodeState &s, NodeId dst, const QosConstraint &qos, TimeMs now) const;
    Actions handle_qry(NodeState &s, const QryPacket &qry, NodeId from, TimeMs now) const;
    Actions handle_upd(NodeState &s, const UpdPacket &upd, NodeId from, TimeMs now) const;
    Actions handle_clr(NodeState &s, const ClrPacket &clr, NodeId from, TimeMs now) const;
    Actions on_link_event(NodeState &s, NodeId neighbor, bool up, TimeMs now) const;
    Actions forward_data(NodeState &s, const DataPacket &data, TimeMs now) const;

    /// PDTORA only: true once the node's residual fraction is below
    /// relay_min_power_fraction.
    bool exhausted(const NodeState &s) const;

    /// Withdraws an exhausted node from every DAG it relays for: its heights
    /// go Null and are advertised. Call after the node's energy changes.
    Actions check_power(NodeState &s, TimeMs now) const;

    /// Neighbor a data packet for dst leaves through, if any. A node with a
    /// height uses its lowest downstream neighbor. An exhausted node has no
    /// height, so every neighbor with a height is below it; it picks the
    /// lowest one, within the delay budget when it asked for the route.
    std::optional<NodeId> next_hop(const NodeState &s, NodeId dst) const;

    /// Dispatches a received packet to the matching handler.
    Actions receive(NodeState &s, const Packet &p, NodeId from, TimeMs now) const;

    /// Partition check for a node that has lost its last downstream link
    /// through a neighbor's height change. Returns the CLR actions when
    /// every neighbor reflects this node's own reference level.
    Actions detect_partition(NodeState &s, NodeId dst) const;

private:
    Actions react_to_neighbor_change(NodeState &s, NodeId dst, TimeMs now) const;
    Actions react_to_link_loss(NodeState &s, NodeId dst, TimeMs now) const;
    bool try_adopt(NodeState &s, NodeId dst, TimeMs now, Actions &out) const;
    void set_height(NodeState &s, NodeId dst, const MaybeHeight &h, std::string_view cause, TimeMs now,
                    Actions &out, bool advertise) const;
    Height generate_level(NodeState &s, TimeMs now) const;

    ProtocolConfig m_cfg;
};

} // namespace pdtora

#endif
