#ifndef PDTORA_HEIGHT_HPP
#define PDTORA_HEIGHT_HPP

#include <compare>
#include <optional>
#include <string>

#include "pdtora/types.hpp"

namespace pdtora {

/// (tau, oid, r) prefix of a height. A new one is created whenever a node
/// loses its last downstream link to a link failure.
struct ReferenceLevel
{
    TimeMs tau = 0.0;
    NodeId oid = 0;
    int r = 0;

    bool operator==(const ReferenceLevel &) const = default;
    std::strong_ordering operator<=>(const ReferenceLevel &o) const
    {
        if (tau != o.tau)
            return tau < o.tau ? std::strong_ordering::less : std::strong_ordering::greater;
        if (auto c = oid <=> o.oid; c != 0)
            return c;
        return r <=> o.r;
    }
};

/// Non-null TORA height. Absence of a route is modelled as an empty
/// std::optional<Height> (see MaybeHeight), never as a sentinel value.
struct Height
{
    TimeMs tau = 0.0;
    NodeId oid = 0;
    int r = 0;
    int delta = 0;
    NodeId id = 0;

    ReferenceLevel level() const { return {tau, oid, r}; }

    bool operator==(const Height &) const = default;
    std::strong_ordering operator<=>(const Height &o) const
    {
        if (auto c = level() <=> o.level(); c != 0)
            return c;
        if (auto c = delta <=> o.delta; c != 0)
            return c;
        return id <=> o.id;
    }

    static Height destination(NodeId dst) { return {0.0, 0, 0, 0, dst}; }
};

using MaybeHeight = std::optional<Height>;

enum class LinkDirection { Downstream, Upstream, Undirected };

// Null is greater than every non-null height and equal to itself.
std::strong_ordering compare_heights(const MaybeHeight &a, const MaybeHeight &b);

LinkDirection link_direction(const MaybeHeight &own, const MaybeHeight &neighbor);

/// Height of a node that originates a fresh reference level at now_ms.
Height new_reference_level(TimeMs now_ms, NodeId self_id);

std::string to_string(const MaybeHeight &h);
std::string to_string(const ReferenceLevel &l);

} // namespace pdtora

#endif
