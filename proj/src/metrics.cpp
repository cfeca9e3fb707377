#include "pdtora/metrics.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "pdtora/numfmt.hpp"

namespace pdtora {

double packet_delivery_ratio(std::uint64_t sent, std::uint64_t received)
{
    if (received > sent)
        throw std::invalid_argument("packet_delivery_ratio: received exceeds sent");
    if (sent == 0)
        return 0.0;
    return static_cast<double>(received) / static_cast<double>(sent);
}

std::optional<TimeMs> average_e2e_delay(std::span<const DeliverySample> delivered)
{
    if (delivered.empty())
        return std::nullopt;
    double sum = 0.0;
    for (const auto &s : delivered) {
        if (s.delivered_at_ms < s.created_at_ms)
            throw std::invalid_argument("average_e2e_delay: delivery precedes creation");
        sum += s.delivered_at_ms - s.created_at_ms;
    }
    return sum / static_cast<double>(delivered.size());
}

void DeathTimeline::record_death(NodeId node, TimeMs at_ms)
{
    if (!m_dead.emplace(node, at_ms).second)
        throw std::logic_error("record_death: node " + std::to_string(node) + " already dead");
    if (!m_first)
        m_first = at_ms;
    m_points.emplace_back(at_ms, static_cast<std::uint32_t>(m_dead.size()));
}

std::uint32_t DeathTimeline::dead_by(TimeMs t) const
{
    std::uint32_t n = 0;
    for (const auto &[at, count] : m_points)
        if (at <= t)
            n = count;
    return n;
}

std::uint64_t FlowLedger::terminated() const
{
    std::uint64_t n = delivered;
    for (const auto &[reason, count] : dropped)
        n += count;
    return n;
}

namespace {

DropReason parse_reason(std::string_view s)
{
    for (auto r : {DropReason::NoRoute, DropReason::PowerReject, DropReason::DelayReject, DropReason::Duplicate,
                   DropReason::Stale, DropReason::DeadNode, DropReason::LostLink, DropReason::LostDeadNode})
        if (to_string(r) == s)
            return r;
    throw std::invalid_argument("unknown drop reason '" + std::string(s) + "'");
}

} // namespace

MetricsReport compute_report(const TraceLog &trace)
{
    MetricsReport m;
    std::vector<DeliverySample> samples;
    for (const auto &r : trace.records()) {
        if (r.event == "death") {
            m.deaths.record_death(r.node, r.time_ms);
            continue;
        }
        if (r.packet_kind != "DATA")
            continue;
        if (r.event == "send") {
            ++m.sent;
            ++m.flows[static_cast<std::uint32_t>(r.number("flow"))].sent;
        } else if (r.event == "deliver") {
            ++m.delivered;
            ++m.flows[static_cast<std::uint32_t>(r.number("flow"))].delivered;
            samples.push_back({r.number("created"), r.time_ms});
        } else if (r.event == "drop" || r.event == "lost") {
            const auto reason = parse_reason(r.field("reason").value_or(""));
            ++m.drops[reason];
            ++m.flows[static_cast<std::uint32_t>(r.number("flow"))].dropped[reason];
        }
    }
    m.pdr = packet_delivery_ratio(m.sent, m.delivered);
    m.packet_loss_ratio = m.sent == 0 ? 0.0 : 1.0 - m.pdr;
    m.avg_e2e_delay_ms = average_e2e_delay(samples);
    if (!samples.empty()) {
        TimeMs worst = 0.0;
        for (const auto &s : samples)
            worst = std::max(worst, s.delivered_at_ms - s.created_at_ms);
        m.max_e2e_delay_ms = worst;
    }
    return m;
}

namespace {

std::string opt(const std::optional<double> &v)
{
    return v ? format_number(*v) : std::string();
}

std::string key_prefix(const RunKey &k)
{
    return std::string(to_string(k.protocol)) + ',' + k.seed + ',' + std::to_string(k.num_nodes) + ',' +
           format_number(k.max_speed_m_s) + ',' + format_number(k.pause_s);
}

} // namespace

std::string summary_row(const RunKey &key, const MetricsReport &m)
{
    return key_prefix(key) + ',' + format_number(m.pdr) + ',' + opt(m.avg_e2e_delay_ms) + ',' +
           format_number(m.packet_loss_ratio) + ',' + opt(m.deaths.first_death_ms()) + ',' +
           std::to_string(m.deaths.dead_count());
}

std::string mean_row(const RunKey &key, std::span<const MetricsReport> runs)
{
    if (runs.empty())
        throw std::invalid_argument("mean_row: no runs");
    auto mean_of = [&](auto get) -> std::optional<double> {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto &r : runs)
            if (std::optional<double> v = get(r)) {
                sum += *v;
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return sum / static_cast<double>(n);
    };
    const auto pdr = mean_of([](const MetricsReport &r) -> std::optional<double> { return r.pdr; });
    const auto delay = mean_of([](const MetricsReport &r) { return r.avg_e2e_delay_ms; });
    const auto loss = mean_of([](const MetricsReport &r) -> std::optional<double> { return r.packet_loss_ratio; });
    const auto first = mean_of([](const MetricsReport &r) { return r.deaths.first_death_ms(); });
    const auto dead = mean_of(
        [](const MetricsReport &r) -> std::optional<double> { return static_cast<double>(r.deaths.dead_count()); });
    return key_prefix(key) + ',' + opt(pdr) + ',' + opt(delay) + ',' + opt(loss) + ',' + opt(first) + ',' + opt(dead);
}

void write_timeline_csv(std::ostream &out, const DeathTimeline &t)
{
    out << kTimelineHeader << '\n';
    for (const auto &[at, count] : t.points())
        out << format_number(at) << ',' << count << '\n';
}

} // namespace pdtora
