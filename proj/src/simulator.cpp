#include "pdtora/simulator.hpp"

#include <algorithm>
#include <stdexcept>

#include "pdtora/numfmt.hpp"

namespace pdtora {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

Simulator::Simulator(ScenarioConfig cfg, SimOptions opts)
    : m_cfg(std::move(cfg)), m_opts(opts),
      m_protocol(ProtocolConfig{m_cfg.protocol == Protocol::Pdtora, m_cfg.route_required_timeout_ms,
                                m_cfg.qos.min_power_fraction})
{
    validate(m_cfg);
    const std::uint32_t n = m_cfg.num_nodes;
    m_flows = effective_flows(m_cfg);

    std::seed_seq seq{m_cfg.seed, std::uint64_t{0x6d6f6269}};
    m_mobility_rng.seed(seq);
    const MobilityParams mp = m_cfg.mobility();

    m_nodes.reserve(n);
    m_rt.resize(n);
    m_radio.resize(n);
    m_alive.assign(n, 1);
    for (NodeId i = 0; i < n; ++i) {
        auto battery = EnergyState::full(m_cfg.initial_energy_j, m_cfg.tx_cost_j_per_bit, m_cfg.rx_cost_j_per_bit);
        if (auto it = m_cfg.node_energy_j.find(i); it != m_cfg.node_energy_j.end())
            battery.residual_j = it->second;
        m_nodes.emplace_back(i, NttEstimator(processing_delay(i), m_cfg.ntt_alpha), battery);
        m_mob.push_back(initial_mobility(mp, m_mobility_rng));
        if (auto it = m_cfg.positions.find(i); it != m_cfg.positions.end())
            m_mob.back().position = m_mob.back().waypoint = it->second;
    }
    m_fixed_links = m_cfg.links;
    m_mobile = m_cfg.links.empty() && m_cfg.max_speed_m_s > 0.0;

    m_links = Adjacency(n);
    for (NodeId i = 0; i < n; ++i)
        if (m_nodes[i].energy.residual_j <= 0.0) {
            m_nodes[i].energy.residual_j = 0.0;
            m_nodes[i].energy.dead_at_ms = 0.0;
            m_alive[i] = 0;
            trace(i, "death", nullptr, "");
        }
    recompute_links();

    schedule(m_cfg.mobility_tick_ms, MobilityTick{});
    for (std::uint32_t f = 0; f < m_flows.size(); ++f)
        schedule(m_flows[f].start_ms, TrafficEmit{f});
    for (std::size_t i = 0; i < m_cfg.moves.size(); ++i)
        schedule(m_cfg.moves[i].at_ms, MoveNode{i});
    for (std::size_t i = 0; i < m_cfg.cuts.size(); ++i)
        schedule(m_cfg.cuts[i].at_ms, CutLink{i});
}

TimeMs Simulator::processing_delay(NodeId n) const
{
    if (auto it = m_cfg.node_ntt_ms.find(n); it != m_cfg.node_ntt_ms.end())
        return it->second;
    return m_cfg.ntt_static_ms;
}

double Simulator::packet_bits(const Packet &p) const
{
    if (const auto *d = std::get_if<DataPacket>(&p))
        return d->size_bits;
    return m_cfg.control_packet_bytes * 8.0;
}

bool Simulator::expired(const DataPacket &d) const
{
    return m_protocol.config().qos_enabled && d.qos && m_now - d.created_at_ms > d.qos->max_delay_ms;
}

void Simulator::schedule(TimeMs at, Payload p)
{
    m_queue.push(Event{at, m_seq++, std::move(p)});
}

void Simulator::run_until(TimeMs t)
{
    const TimeMs stop = std::min(t, m_cfg.sim_end_ms);
    while (!m_queue.empty() && m_queue.top().at <= stop) {
        Event e = m_queue.top();
        m_queue.pop();
        if (e.at < m_now)
            throw std::logic_error("event scheduled in the past");
        m_now = e.at;
        ++m_events;
        dispatch(e);
    }
    m_now = std::max(m_now, stop);
}

void Simulator::dispatch(const Event &e)
{
    Payload payload = e.payload;
    std::visit(overloaded{
                   [&](MobilityTick &) { on_tick(); },
                   [&](TxDone &x) { on_tx_done(x.node); },
                   [&](Enqueue &x) { on_enqueue(x); },
                   [&](Delivery &x) { on_delivery(x); },
                   [&](TrafficEmit &x) { on_traffic(x.flow); },
                   [&](MoveNode &x) { on_move(x.index); },
                   [&](CutLink &x) { on_cut(x.index); },
               },
               payload);
}

// ---- tracing ---------------------------------------------------------------

void Simulator::trace(NodeId n, std::string event, const Packet *p, std::string detail)
{
    TraceRecord r;
    r.time_ms = m_now;
    r.node = n;
    r.event = std::move(event);
    if (p) {
        r.packet_kind = std::string(to_string(kind_of(*p)));
        r.src = packet_source(*p);
        r.dst = packet_destination(*p);
    }
    r.detail = std::move(detail);
    m_trace.add(std::move(r));
}

void Simulator::trace_data(NodeId n, std::string_view event, const DataPacket &d, Detail detail)
{
    std::string text = Detail().add("flow", static_cast<std::uint64_t>(d.flow)).add("seq", d.seq).str();
    if (!detail.str().empty())
        text += ';' + detail.str();
    const Packet p = d;
    trace(n, std::string(event), &p, std::move(text));
}

void Simulator::trace_drop(NodeId n, DropReason reason, const Packet &p)
{
    Detail d;
    d.add("reason", to_string(reason));
    if (const auto *data = std::get_if<DataPacket>(&p)) {
        const bool loss = reason == DropReason::LostLink || reason == DropReason::LostDeadNode;
        trace_data(n, loss ? "lost" : "drop", *data, std::move(d));
        return;
    }
    if (const auto *q = std::get_if<QryPacket>(&p))
        d.add("budget", q->delay_budget_ms);
    trace(n, "drop", &p, std::move(d).str());
}

// ---- actions -----------------------------------------------------------------

void Simulator::apply(NodeId n, const Actions &actions, std::optional<TimeMs> received_at)
{
    for (const auto &a : actions) {
        std::visit(overloaded{
                       [&](const Broadcast &b) {
                           OutPacket out{b.packet, received_at};
                           if (received_at)
                               schedule(m_now + processing_delay(n), Enqueue{n, std::move(out)});
                           else
                               enqueue(n, std::move(out));
                       },
                       [&](const Unicast &u) {
                           // Next hop is resolved again when the MAC starts the transmission.
                           OutPacket out{u.packet, received_at};
                           if (received_at)
                               schedule(m_now + processing_delay(n), Enqueue{n, std::move(out)});
                           else
                               enqueue(n, std::move(out));
                       },
                       [&](const DropPacket &d) { trace_drop(n, d.reason, d.packet); },
                       [&](const DeliverData &d) {
                           Detail det;
                           det.add("created", d.data.created_at_ms).add("delay", m_now - d.data.created_at_ms);
                           trace_data(n, "deliver", d.data, std::move(det));
                       },
                       [&](const SetHeight &h) {
                           TraceRecord r;
                           r.time_ms = m_now;
                           r.node = n;
                           r.event = "set_height";
                           r.dst = h.dst;
                           r.detail = Detail().add("cause", h.cause).add("height", to_string(h.height)).str();
                           m_trace.add(std::move(r));
                           if (h.height)
                               flush_buffer(n, h.dst);
                       },
                       [&](const DetectPartition &p) {
                           TraceRecord r;
                           r.time_ms = m_now;
                           r.node = n;
                           r.event = "partition";
                           r.dst = p.dst;
                           r.detail = Detail().add("level", to_string(p.level)).str();
                           m_trace.add(std::move(r));
                       },
                       [&](const QueryAdmitted &q) {
                           const Packet p = q.query;
                           trace(n, "qry_admit", &p,
                                 Detail()
                                     .add("budget_in", q.query.delay_budget_ms)
                                     .add("budget_out", q.budget_out_ms)
                                     .add("ntt", q.ntt_ms)
                                     .add("residual", q.residual_fraction)
                                     .add("min_power", q.query.min_power_fraction)
                                     .str());
                       },
                   },
                   a);
    }
}

// ---- MAC ---------------------------------------------------------------------

void Simulator::enqueue(NodeId n, OutPacket out)
{
    if (!m_alive[n]) {
        if (const auto *d = std::get_if<DataPacket>(&out.packet))
            trace_drop(n, DropReason::LostDeadNode, *d);
        return;
    }
    m_rt[n].mac.push_back(std::move(out));
    start_tx(n);
}

void Simulator::on_enqueue(Enqueue &e)
{
    enqueue(e.node, std::move(e.out));
}

void Simulator::on_tx_done(NodeId n)
{
    m_rt[n].busy = false;
    start_tx(n);
}

void Simulator::start_tx(NodeId n)
{
    auto &rt = m_rt[n];
    auto &node = m_nodes[n];
    if (rt.busy || !m_alive[n])
        return;
    const bool qos = m_protocol.config().qos_enabled;

    while (!rt.mac.empty()) {
        OutPacket out = std::move(rt.mac.front());
        rt.mac.pop_front();
        std::optional<NodeId> next_hop;

        if (auto *data = std::get_if<DataPacket>(&out.packet)) {
            if (expired(*data)) {
                trace_drop(n, DropReason::DelayReject, *data);
                continue;
            }
            const Actions route = m_protocol.forward_data(node, *data, m_now);
            const auto *uni = route.empty() ? nullptr : std::get_if<Unicast>(&route.front());
            if (!uni) {
                if (data->src == n)
                    buffer_data(n, *data);
                else
                    apply(n, route, std::nullopt);
                continue;
            }
            next_hop = uni->next_hop;
        }

        const double residual = residual_fraction(node.energy);
        if (const auto *q = std::get_if<QryPacket>(&out.packet)) {
            if (qos && q->src != n && residual < q->min_power_fraction) {
                trace_drop(n, DropReason::PowerReject, out.packet);
                continue;
            }
        }

        const double bits = packet_bits(out.packet);
        const TimeMs tx_ms = bits / m_cfg.bitrate_bps * 1000.0;

        std::visit(overloaded{
                       [&](const QryPacket &q) {
                           trace(n, "tx", &out.packet,
                                 Detail()
                                     .add("budget", q.delay_budget_ms)
                                     .add("residual", residual)
                                     .add("min_power", q.min_power_fraction)
                                     .str());
                       },
                       [&](const UpdPacket &u) {
                           trace(n, "tx", &out.packet,
                                 Detail()
                                     .add("height", to_string(u.sender_height))
                                     .add("acc", u.accumulated_delay_ms)
                                     .str());
                       },
                       [&](const ClrPacket &c) {
                           trace(n, "tx", &out.packet, Detail().add("level", to_string(c.ref_level)).str());
                       },
                       [&](const DataPacket &d) {
                           if (m_opts.trace_data_hops)
                               trace_data(n, "tx", d, Detail().add("next", *next_hop));
                       },
                   },
                   out.packet);

        drain(node.energy, RadioOp::Tx, bits, m_now);
        m_radio[n].tx_bits += bits;
        if (node.energy.dead()) {
            if (const auto *d = std::get_if<DataPacket>(&out.packet))
                trace_drop(n, DropReason::LostDeadNode, *d);
            kill(n);
            return;
        }
        apply(n, m_protocol.check_power(node, m_now), std::nullopt);
        if (out.received_at && node.ntt.adaptive())
            node.ntt.observe(m_now - *out.received_at);

        const TimeMs arrive = m_now + tx_ms;
        if (next_hop) {
            schedule(arrive, Delivery{*next_hop, n, out.packet});
        } else {
            for (NodeId nb : m_links.neighbors(n))
                schedule(arrive, Delivery{nb, n, out.packet});
        }
        rt.busy = true;
        schedule(arrive, TxDone{n});
        return;
    }
}

void Simulator::on_delivery(Delivery &d)
{
    const auto *data = std::get_if<DataPacket>(&d.packet);
    if (!m_alive[d.to] || !m_alive[d.from]) {
        if (data)
            trace_drop(d.to, DropReason::LostDeadNode, *data);
        return;
    }
    if (!m_links.linked(d.from, d.to)) {
        if (data)
            trace_drop(d.to, DropReason::LostLink, *data);
        return;
    }
    auto &node = m_nodes[d.to];
    const double bits = packet_bits(d.packet);
    drain(node.energy, RadioOp::Rx, bits, m_now);
    m_radio[d.to].rx_bits += bits;
    if (node.energy.dead()) {
        if (data)
            trace_drop(d.to, DropReason::LostDeadNode, *data);
        kill(d.to);
        return;
    }
    apply(d.to, m_protocol.check_power(node, m_now), std::nullopt);
    if (data && m_opts.trace_data_hops)
        trace_data(d.to, "rx", *data, Detail().add("from", d.from));
    const Actions acts = m_protocol.receive(node, d.packet, d.from, m_now);
    apply(d.to, acts, m_now);
    if (const auto *upd = std::get_if<UpdPacket>(&d.packet))
        flush_buffer(d.to, upd->dst);
}

// ---- traffic and source buffering -------------------------------------------

void Simulator::on_traffic(std::uint32_t f)
{
    const Flow &flow = m_flows[f];
    if (m_now >= flow.stop_ms)
        return;
    if (m_now + flow.interval_ms < flow.stop_ms)
        schedule(m_now + flow.interval_ms, TrafficEmit{f});
    if (!m_alive[flow.src])
        return;

    DataPacket d;
    d.src = flow.src;
    d.dst = flow.dst;
    d.seq = m_rt[flow.src].next_seq++;
    d.flow = f;
    d.size_bits = flow.packet_bits;
    d.created_at_ms = m_now;
    d.qos = m_cfg.qos;
    trace_data(flow.src, "send", d, Detail());

    if (m_protocol.next_hop(m_nodes[flow.src], flow.dst) && m_rt[flow.src].buffer[flow.dst].empty())
        enqueue(flow.src, OutPacket{d, std::nullopt});
    else
        buffer_data(flow.src, d);
}

void Simulator::buffer_data(NodeId n, const DataPacket &d)
{
    auto &buf = m_rt[n].buffer[d.dst];
    if (buf.size() >= m_cfg.source_buffer_packets) {
        trace_drop(n, DropReason::NoRoute, d);
        return;
    }
    buf.push_back(d);
    if (!m_protocol.next_hop(m_nodes[n], d.dst))
        apply(n, m_protocol.initiate_route(m_nodes[n], d.dst, m_cfg.qos, m_now), std::nullopt);
}

void Simulator::flush_buffer(NodeId n, NodeId dst)
{
    auto it = m_rt[n].buffer.find(dst);
    if (it == m_rt[n].buffer.end() || it->second.empty())
        return;
    if (!m_protocol.next_hop(m_nodes[n], dst))
        return;
    std::deque<DataPacket> pending;
    pending.swap(it->second);
    for (auto &d : pending)
        enqueue(n, OutPacket{std::move(d), std::nullopt});
}

void Simulator::maintain_buffers()
{
    for (NodeId n = 0; n < m_nodes.size(); ++n) {
        if (!m_alive[n])
            continue;
        for (auto &[dst, buf] : m_rt[n].buffer) {
            std::deque<DataPacket> keep;
            for (auto &d : buf) {
                if (expired(d))
                    trace_drop(n, DropReason::DelayReject, d);
                else if (m_now - d.created_at_ms > m_cfg.source_buffer_timeout_ms)
                    trace_drop(n, DropReason::NoRoute, d);
                else
                    keep.push_back(std::move(d));
            }
            buf.swap(keep);
        }
        for (auto &[dst, buf] : m_rt[n].buffer) {
            if (buf.empty())
                continue;
            if (m_protocol.next_hop(m_nodes[n], dst))
                flush_buffer(n, dst);
            else
                apply(n, m_protocol.initiate_route(m_nodes[n], dst, m_cfg.qos, m_now), std::nullopt);
        }
    }
}

// ---- topology ----------------------------------------------------------------

Adjacency Simulator::compute_links() const
{
    if (m_fixed_links.empty()) {
        std::vector<Vec2> pos(m_mob.size());
        std::transform(m_mob.begin(), m_mob.end(), pos.begin(), [](const MobilityState &m) { return m.position; });
        return unit_disc_links(pos, m_alive, m_cfg.range_m);
    }
    Adjacency adj(m_nodes.size());
    for (const auto &[a, b] : m_fixed_links)
        if (m_alive[a] && m_alive[b])
            adj.set(a, b, true);
    return adj;
}

void Simulator::apply_link_transitions(const std::vector<LinkTransition> &changes)
{
    for (const auto &c : changes)
        m_links.set(c.a, c.b, c.up);
    for (const auto &c : changes) {
        if (m_opts.trace_links)
            trace(c.a, c.up ? "link_up" : "link_down", nullptr, Detail().add("peer", c.b).str());
        apply(c.a, m_protocol.on_link_event(m_nodes[c.a], c.b, c.up, m_now), std::nullopt);
        apply(c.b, m_protocol.on_link_event(m_nodes[c.b], c.a, c.up, m_now), std::nullopt);
    }
}

void Simulator::recompute_links()
{
    const Adjacency next = compute_links();
    apply_link_transitions(diff_links(m_links, next));
}

void Simulator::on_tick()
{
    if (m_mobile) {
        const MobilityParams mp = m_cfg.mobility();
        const TimeMs from = m_now - m_cfg.mobility_tick_ms;
        for (auto &m : m_mob)
            m = step_mobility(m, from, m_cfg.mobility_tick_ms, mp, m_mobility_rng);
        recompute_links();
    }
    maintain_buffers();
    if (m_now + m_cfg.mobility_tick_ms <= m_cfg.sim_end_ms)
        schedule(m_now + m_cfg.mobility_tick_ms, MobilityTick{});
}

void Simulator::on_move(std::size_t i)
{
    const auto &mv = m_cfg.moves[i];
    m_mob[mv.node].position = m_mob[mv.node].waypoint = mv.to;
    m_mob[mv.node].moving = false;
    m_mob[mv.node].paused_until_ms = m_now + m_cfg.pause_s * 1000.0;
    recompute_links();
}

void Simulator::on_cut(std::size_t i)
{
    const auto &cut = m_cfg.cuts[i];
    std::erase_if(m_fixed_links, [&](const auto &l) {
        return (l.first == cut.a && l.second == cut.b) || (l.first == cut.b && l.second == cut.a);
    });
    recompute_links();
}

void Simulator::kill(NodeId n)
{
    if (!m_alive[n])
        return;
    m_alive[n] = 0;
    trace(n, "death", nullptr, "");
    auto &rt = m_rt[n];
    for (auto &out : rt.mac)
        if (const auto *d = std::get_if<DataPacket>(&out.packet))
            trace_drop(n, DropReason::LostDeadNode, *d);
    rt.mac.clear();
    for (auto &[dst, buf] : rt.buffer)
        for (const auto &d : buf)
            trace_drop(n, DropReason::LostDeadNode, d);
    rt.buffer.clear();

    std::vector<LinkTransition> gone;
    for (NodeId nb : m_links.neighbors(n))
        gone.push_back({std::min(n, nb), std::max(n, nb), false});
    for (const auto &c : gone)
        m_links.set(c.a, c.b, false);
    for (const auto &c : gone) {
        const NodeId other = c.a == n ? c.b : c.a;
        if (m_opts.trace_links)
            trace(c.a, "link_down", nullptr, Detail().add("peer", c.b).str());
        apply(other, m_protocol.on_link_event(m_nodes[other], n, false, m_now), std::nullopt);
    }
    m_nodes[n].neighbors.clear();
}

RunResult Simulator::finish()
{
    run_until(m_cfg.sim_end_ms);
    RunResult res;
    res.scenario = m_cfg;
    res.report = compute_report(m_trace);

    auto count = [&](const Packet &p) {
        if (const auto *d = std::get_if<DataPacket>(&p))
            ++res.in_flight[d->flow];
    };
    for (const auto &rt : m_rt) {
        for (const auto &out : rt.mac)
            count(out.packet);
        for (const auto &[dst, buf] : rt.buffer)
            for (const auto &d : buf)
                count(d);
    }
    auto q = m_queue;
    while (!q.empty()) {
        std::visit(overloaded{
                       [&](const Enqueue &e) { count(e.out.packet); },
                       [&](const Delivery &d) { count(d.packet); },
                       [](const auto &) {},
                   },
                   q.top().payload);
        q.pop();
    }

    res.trace = std::move(m_trace);
    res.nodes = m_nodes;
    res.radio = m_radio;
    res.mobility = m_mob;
    res.links = m_links;
    res.events = m_events;
    return res;
}

RunResult run(const ScenarioConfig &cfg, SimOptions opts)
{
    Simulator sim(cfg, opts);
    return sim.finish();
}

} // namespace pdtora
