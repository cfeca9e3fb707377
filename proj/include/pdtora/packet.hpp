#ifndef PDTORA_PACKET_HPP
#define PDTORA_PACKET_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "pdtora/height.hpp"
#include "pdtora/qos.hpp"
#include "pdtora/types.hpp"

namespace pdtora {

/// Route query with the power/delay extension.
struct QryPacket
{
    NodeId src = 0;
    NodeId dst = 0;
    double min_power_fraction = 0.0;
    TimeMs delay_budget_ms = 0.0;

    bool operator==(const QryPacket &) const = default;
};

/// Height advertisement. A null sender_height withdraws the sender's route.
struct UpdPacket
{
    NodeId dst = 0;
    MaybeHeight sender_height;
    TimeMs accumulated_delay_ms = 0.0;

    bool operator==(const UpdPacket &) const = default;
};

struct ClrPacket
{
    NodeId dst = 0;
    ReferenceLevel ref_level;

    bool operator==(const ClrPacket &) const = default;
};

struct DataPacket
{
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t seq = 0;
    std::uint32_t flow = 0;
    double size_bits = 0.0;
    TimeMs created_at_ms = 0.0;
    std::optional<QosConstraint> qos;

    bool operator==(const DataPacket &) const = default;
};

using Packet = std::variant<QryPacket, UpdPacket, ClrPacket, DataPacket>;

enum class PacketKind { Qry, Upd, Clr, Data };

inline PacketKind kind_of(const Packet &p) { return static_cast<PacketKind>(p.index()); }

std::string_view to_string(PacketKind k);

/// Destination the packet concerns (data destination or routed-to node).
NodeId packet_destination(const Packet &p);

/// Originating source, where the packet type has one.
std::optional<NodeId> packet_source(const Packet &p);

} // namespace pdtora

#endif
