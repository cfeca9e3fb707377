#include "pdtora/packet.hpp"

namespace pdtora {

std::string_view to_string(PacketKind k)
{
    switch (k) {
    case PacketKind::Qry:
        return "QRY";
    case PacketKind::Upd:
        return "UPD";
    case PacketKind::Clr:
        return "CLR";
    case PacketKind::Data:
        return "DATA";
    }
    return "?";
}

NodeId packet_destination(const Packet &p)
{
    return std::visit([](const auto &x) { return x.dst; }, p);
}

std::optional<NodeId> packet_source(const Packet &p)
{
    if (const auto *q = std::get_if<QryPacket>(&p))
        return q->src;
    if (const auto *d = std::get_if<DataPacket>(&p))
        return d->src;
    return std::nullopt;
}

} // namespace pdtora
