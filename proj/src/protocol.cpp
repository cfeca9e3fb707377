#include "pdtora/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdtora {

std::string_view to_string(DropReason r)
{
    switch (r) {
    case DropReason::NoRoute:
        return "NoRoute";
    case DropReason::PowerReject:
        return "PowerReject";
    case DropReason::DelayReject:
        return "DelayReject";
    case DropReason::Duplicate:
        return "Duplicate";
    case DropReason::Stale:
        return "Stale";
    case DropReason::DeadNode:
        return "DeadNode";
    case DropReason::LostLink:
        return "LostLink";
    case DropReason::LostDeadNode:
        return "LostDeadNode";
    }
    return "?";
}

const DestinationState *NodeState::find_dest(NodeId dst) const
{
    auto it = dests.find(dst);
    return it == dests.end() ? nullptr : &it->second;
}

bool has_downstream(const DestinationState &ds)
{
    if (!ds.height)
        return false;
    return std::any_of(ds.neighbors.begin(), ds.neighbors.end(),
                       [&](const auto &kv) { return kv.second.height < *ds.height; });
}

std::optional<NodeId> best_downstream(const DestinationState &ds)
{
    if (!ds.height)
        return std::nullopt;
    std::optional<NodeId> best;
    const Height *best_h = nullptr;
    for (const auto &[nbr, route] : ds.neighbors) {
        if (!(route.height < *ds.height))
            continue;
        if (!best_h || route.height < *best_h) {
            best = nbr;
            best_h = &route.height;
        }
    }
    return best;
}

namespace {

// A clear erases a reference level in both its unreflected and reflected form.
bool same_reference(const ReferenceLevel &a, const ReferenceLevel &b)
{
    return a.tau == b.tau && a.oid == b.oid;
}

bool is_cleared(const DestinationState &ds, const ReferenceLevel &level)
{
    return std::any_of(ds.cleared_levels.begin(), ds.cleared_levels.end(),
                       [&](const ReferenceLevel &l) { return same_reference(l, level); });
}

void expire_seen(DestinationState &ds, TimeMs now)
{
    std::erase_if(ds.qry_seen, [now](const auto &kv) { return kv.second.expires_ms <= now; });
}

} // namespace

Height ToraProtocol::generate_level(NodeState &s, TimeMs now) const
{
    TimeMs tau = now;
    if (tau <= s.last_tau_issued)
        tau = std::nextafter(s.last_tau_issued, std::numeric_limits<double>::infinity());
    s.last_tau_issued = tau;
    return new_reference_level(tau, s.id);
}

void ToraProtocol::set_height(NodeState &s, NodeId dst, const MaybeHeight &h, std::string_view cause, TimeMs now,
                              Actions &out, bool advertise) const
{
    auto &ds = s.dests[dst];
    ds.height = h;
    if (h) {
        ds.route_required = false;
        ds.origin = false;
    }
    out.push_back(SetHeight{dst, h, cause});
    if (advertise) {
        out.push_back(Broadcast{UpdPacket{dst, h, ds.delay_to_dst_ms.value_or(0.0)}});
        ds.last_upd_time = now;
    }
}

bool ToraProtocol::exhausted(const NodeState &s) const
{
    return m_cfg.qos_enabled && residual_fraction(s.energy) < m_cfg.relay_min_power_fraction;
}

Actions ToraProtocol::check_power(NodeState &s, TimeMs now) const
{
    Actions out;
    if (s.energy.dead() || !exhausted(s))
        return out;
    for (auto &[dst, ds] : s.dests) {
        if (dst == s.id || !ds.height)
            continue;
        ds.delay_to_dst_ms.reset();
        set_height(s, dst, std::nullopt, "power", now, out, true);
    }
    return out;
}

std::optional<NodeId> ToraProtocol::next_hop(const NodeState &s, NodeId dst) const
{
    const auto *ds = s.find_dest(dst);
    if (!ds)
        return std::nullopt;
    if (ds->height)
        return best_downstream(*ds);
    if (!exhausted(s))
        return std::nullopt;
    std::optional<NodeId> best;
    const Height *best_h = nullptr;
    for (const auto &[nbr, route] : ds->neighbors) {
        if (ds->origin && route.delay_ms > ds->qry_budget_ms)
            continue;
        if (!best_h || route.height < *best_h) {
            best = nbr;
            best_h = &route.height;
        }
    }
    return best;
}

bool ToraProtocol::try_adopt(NodeState &s, NodeId dst, TimeMs now, Actions &out) const
{
    auto &ds = s.dests[dst];
    if (ds.height || !ds.route_required_active(now) || exhausted(s))
        return false;
    const TimeMs ntt = s.ntt.current();
    const TimeMs own_charge = ds.origin ? 0.0 : ntt;
    const NeighborRoute *chosen = nullptr;
    for (const auto &[nbr, route] : ds.neighbors) {
        if (m_cfg.qos_enabled && route.delay_ms + own_charge > ds.qry_budget_ms)
            continue;
        if (!chosen || route.height < chosen->height)
            chosen = &route;
    }
    if (!chosen)
        return false;
    const Height adopted{chosen->height.tau, chosen->height.oid, chosen->height.r, chosen->height.delta + 1, s.id};
    ds.delay_to_dst_ms = chosen->delay_ms + ntt;
    set_height(s, dst, adopted, "adopt", now, out, true);
    return true;
}

Actions ToraProtocol::initiate_route(NodeState &s, NodeId dst, const QosConstraint &qos, TimeMs now) const
{
    Actions out;
    if (s.energy.dead() || s.id == dst)
        return out;
    auto &ds = s.dests[dst];
    if (ds.height || ds.route_required_active(now))
        return out;
    ds.route_required = true;
    ds.origin = true;
    ds.rr_expires_ms = now + m_cfg.route_required_timeout_ms;
    ds.qry_budget_ms = qos.max_delay_ms;
    expire_seen(ds, now);
    ds.qry_seen[s.id] = {qos.max_delay_ms, ds.rr_expires_ms};
    out.push_back(Broadcast{QryPacket{s.id, dst, qos.min_power_fraction, qos.max_delay_ms}});
    return out;
}

Actions ToraProtocol::handle_qry(NodeState &s, const QryPacket &qry, NodeId /*from*/, TimeMs now) const
{
    Actions out;
    if (s.energy.dead())
        return out;
    if (qry.src == s.id) {
        out.push_back(DropPacket{DropReason::Duplicate, qry});
        return out;
    }
    auto &ds = s.dests[qry.dst];
    expire_seen(ds, now);
    if (auto it = ds.qry_seen.find(qry.src); it != ds.qry_seen.end() && qry.delay_budget_ms <= it->second.budget_ms) {
        out.push_back(DropPacket{DropReason::Duplicate, qry});
        return out;
    }
    ds.qry_seen[qry.src] = {qry.delay_budget_ms, now + m_cfg.route_required_timeout_ms};

    if (s.id == qry.dst) {
        ds.height = Height::destination(s.id);
        ds.delay_to_dst_ms = 0.0;
        out.push_back(Broadcast{UpdPacket{qry.dst, ds.height, 0.0}});
        ds.last_upd_time = now;
        return out;
    }

    const TimeMs ntt = s.ntt.current();
    const double residual = residual_fraction(s.energy);
    TimeMs budget_out = qry.delay_budget_ms;
    if (m_cfg.qos_enabled) {
        const auto verdict = admit_query(residual, qry.delay_budget_ms, ntt,
                                         QosConstraint{qry.min_power_fraction, qry.delay_budget_ms},
                                         ds.height ? ds.delay_to_dst_ms : std::nullopt);
        if (std::holds_alternative<RejectPower>(verdict)) {
            out.push_back(DropPacket{DropReason::PowerReject, qry});
            return out;
        }
        if (std::holds_alternative<RejectDelay>(verdict)) {
            out.push_back(DropPacket{DropReason::DelayReject, qry});
            return out;
        }
        budget_out = std::get<Admit>(verdict).remaining_budget_ms;
    }
    out.push_back(QueryAdmitted{qry, budget_out, ntt, residual});

    if (ds.height) {
        out.push_back(Broadcast{UpdPacket{qry.dst, ds.height, ds.delay_to_dst_ms.value_or(ntt)}});
        ds.last_upd_time = now;
        return out;
    }

    const bool was_active = ds.route_required_active(now);
    ds.route_required = true;
    ds.rr_expires_ms = now + m_cfg.route_required_timeout_ms;
    ds.qry_budget_ms = was_active ? std::max(ds.qry_budget_ms, qry.delay_budget_ms) : qry.delay_budget_ms;

    // A better budget may already make a known neighbor acceptable.
    if (try_adopt(s, qry.dst, now, out))
        return out;

    QryPacket fwd = qry;
    fwd.delay_budget_ms = budget_out;
    out.push_back(Broadcast{fwd});
    return out;
}

Actions ToraProtocol::handle_upd(NodeState &s, const UpdPacket &upd, NodeId from, TimeMs now) const
{
    Actions out;
    if (s.energy.dead())
        return out;
    auto &ds = s.dests[upd.dst];
    if (upd.sender_height && is_cleared(ds, upd.sender_height->level())) {
        out.push_back(DropPacket{DropReason::Stale, upd});
        return out;
    }

    const bool had_down = has_downstream(ds);
    if (upd.sender_height)
        ds.neighbors[from] = {*upd.sender_height, upd.accumulated_delay_ms};
    else
        ds.neighbors.erase(from);

    if (s.id == upd.dst)
        return out;

    if (!ds.height) {
        try_adopt(s, upd.dst, now, out);
        return out;
    }

    if (!has_downstream(ds)) {
        if (!had_down)
            return out;
        if (!upd.sender_height)
            return react_to_link_loss(s, upd.dst, now);
        return react_to_neighbor_change(s, upd.dst, now);
    }

    if (upd.sender_height && *upd.sender_height < *ds.height && best_downstream(ds) == from)
        ds.delay_to_dst_ms = upd.accumulated_delay_ms + s.ntt.current();
    return out;
}

Actions ToraProtocol::react_to_link_loss(NodeState &s, NodeId dst, TimeMs now) const
{
    Actions out;
    auto &ds = s.dests[dst];
    if (s.neighbors.empty()) {
        set_height(s, dst, std::nullopt, "isolated", now, out, false);
        return out;
    }
    if (ds.neighbors.empty()) {
        // Nobody left with a route; withdraw so neighbors stop using us.
        set_height(s, dst, std::nullopt, "no-route", now, out, true);
        return out;
    }
    set_height(s, dst, generate_level(s, now), "generate", now, out, true);
    return out;
}

Actions ToraProtocol::react_to_neighbor_change(NodeState &s, NodeId dst, TimeMs now) const
{
    auto &ds = s.dests[dst];
    if (ds.neighbors.empty())
        return react_to_link_loss(s, dst, now);

    const ReferenceLevel first = ds.neighbors.begin()->second.height.level();
    const bool same_level = std::all_of(ds.neighbors.begin(), ds.neighbors.end(),
                                        [&](const auto &kv) { return kv.second.height.level() == first; });
    Actions out;
    if (!same_level) {
        // Propagate: take the highest neighbor level, just below its lowest member.
        ReferenceLevel top = first;
        for (const auto &kv : ds.neighbors)
            top = std::max(top, kv.second.height.level());
        int min_delta = std::numeric_limits<int>::max();
        for (const auto &kv : ds.neighbors)
            if (kv.second.height.level() == top)
                min_delta = std::min(min_delta, kv.second.height.delta);
        const Height h{top.tau, top.oid, top.r, min_delta - 1, s.id};
        ds.height = h;
        if (auto next = best_downstream(ds))
            ds.delay_to_dst_ms = ds.neighbors.at(*next).delay_ms + s.ntt.current();
        set_height(s, dst, h, "propagate", now, out, true);
        return out;
    }
    if (first.tau == 0.0 || (first.r == 1 && first.oid != s.id)) {
        set_height(s, dst, generate_level(s, now), "generate", now, out, true);
        return out;
    }
    if (first.r == 0) {
        const Height h{first.tau, first.oid, 1, 0, s.id};
        set_height(s, dst, h, "reflect", now, out, true);
        return out;
    }
    return detect_partition(s, dst);
}

Actions ToraProtocol::detect_partition(NodeState &s, NodeId dst) const
{
    Actions out;
    auto &ds = s.dests[dst];
    if (ds.neighbors.empty())
        return out;
    const ReferenceLevel level = ds.neighbors.begin()->second.height.level();
    const bool reflected_own = level.r == 1 && level.oid == s.id;
    const bool uniform = std::all_of(ds.neighbors.begin(), ds.neighbors.end(),
                                     [&](const auto &kv) { return kv.second.height.level() == level; });
    if (!reflected_own || !uniform)
        return out;
    out.push_back(DetectPartition{dst, level});
    ds.neighbors.clear();
    ds.cleared_levels.push_back(level);
    ds.route_required = false;
    ds.delay_to_dst_ms.reset();
    ds.height.reset();
    out.push_back(SetHeight{dst, std::nullopt, "partition"});
    out.push_back(Broadcast{ClrPacket{dst, level}});
    return out;
}

Actions ToraProtocol::handle_clr(NodeState &s, const ClrPacket &clr, NodeId /*from*/, TimeMs now) const
{
    Actions out;
    if (s.energy.dead())
        return out;
    auto &ds = s.dests[clr.dst];
    if (is_cleared(ds, clr.ref_level)) {
        out.push_back(DropPacket{DropReason::Duplicate, clr});
        return out;
    }
    ds.cleared_levels.push_back(clr.ref_level);
    const bool had_down = has_downstream(ds);
    const bool own_level = ds.height && same_reference(ds.height->level(), clr.ref_level) && s.id != clr.dst;

    if (own_level) {
        ds.neighbors.clear();
        ds.delay_to_dst_ms.reset();
        set_height(s, clr.dst, std::nullopt, "clear", now, out, false);
        out.push_back(Broadcast{clr});
        return out;
    }

    std::erase_if(ds.neighbors, [&](const auto &kv) { return same_reference(kv.second.height.level(), clr.ref_level); });
    if (s.id != clr.dst && ds.height && had_down && !has_downstream(ds)) {
        auto more = react_to_link_loss(s, clr.dst, now);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

Actions ToraProtocol::on_link_event(NodeState &s, NodeId neighbor, bool up, TimeMs now) const
{
    Actions out;
    if (s.energy.dead())
        return out;
    if (up) {
        s.neighbors.insert(neighbor);
        for (auto &[dst, ds] : s.dests) {
            if (!ds.height)
                continue;
            out.push_back(Broadcast{UpdPacket{dst, ds.height, ds.delay_to_dst_ms.value_or(0.0)}});
            ds.last_upd_time = now;
        }
        return out;
    }

    s.neighbors.erase(neighbor);
    std::vector<NodeId> lost;
    for (auto &[dst, ds] : s.dests) {
        const bool had_down = has_downstream(ds);
        ds.neighbors.erase(neighbor);
        if (dst != s.id && ds.height && had_down && !has_downstream(ds))
            lost.push_back(dst);
    }
    for (NodeId dst : lost) {
        auto more = react_to_link_loss(s, dst, now);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

Actions ToraProtocol::forward_data(NodeState &s, const DataPacket &data, TimeMs /*now*/) const
{
    Actions out;
    if (s.id == data.dst) {
        out.push_back(DeliverData{data});
        return out;
    }
    if (s.energy.dead()) {
        out.push_back(DropPacket{DropReason::DeadNode, data});
        return out;
    }
    const auto next = next_hop(s, data.dst);
    if (!next) {
        out.push_back(DropPacket{DropReason::NoRoute, data});
        return out;
    }
    out.push_back(Unicast{*next, data});
    return out;
}

Actions ToraProtocol::receive(NodeState &s, const Packet &p, NodeId from, TimeMs now) const
{
    return std::visit(
        [&](const auto &pkt) -> Actions {
            using T = std::decay_t<decltype(pkt)>;
            if constexpr (std::is_same_v<T, QryPacket>)
                return handle_qry(s, pkt, from, now);
            else if constexpr (std::is_same_v<T, UpdPacket>)
                return handle_upd(s, pkt, from, now);
            else if constexpr (std::is_same_v<T, ClrPacket>)
                return handle_clr(s, pkt, from, now);
            else
                return forward_data(s, pkt, now);
        },
        p);
}

} // namespace pdtora
