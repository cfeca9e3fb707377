#include "pdtora/height.hpp"

#include "pdtora/numfmt.hpp"

namespace pdtora {

std::strong_ordering compare_heights(const MaybeHeight &a, const MaybeHeight &b)
{
    if (!a && !b)
        return std::strong_ordering::equal;
    if (!a)
        return std::strong_ordering::greater;
    if (!b)
        return std::strong_ordering::less;
    return *a <=> *b;
}

LinkDirection link_direction(const MaybeHeight &own, const MaybeHeight &neighbor)
{
    if (!own || !neighbor)
        return LinkDirection::Undirected;
    return *neighbor < *own ? LinkDirection::Downstream : LinkDirection::Upstream;
}

Height new_reference_level(TimeMs now_ms, NodeId self_id)
{
    return {now_ms, self_id, 0, 0, self_id};
}

std::string to_string(const ReferenceLevel &l)
{
    return "(" + format_number(l.tau) + " " + std::to_string(l.oid) + " " + std::to_string(l.r) + ")";
}

std::string to_string(const MaybeHeight &h)
{
    if (!h)
        return "null";
    return "(" + format_number(h->tau) + " " + std::to_string(h->oid) + " " + std::to_string(h->r) + " " +
           std::to_string(h->delta) + " " + std::to_string(h->id) + ")";
}

} // namespace pdtora
