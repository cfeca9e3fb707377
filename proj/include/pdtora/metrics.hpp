#ifndef PDTORA_METRICS_HPP
#define PDTORA_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdtora/protocol.hpp"
#include "pdtora/trace.hpp"
#include "pdtora/types.hpp"

namespace pdtora {

double packet_delivery_ratio(std::uint64_t sent, std::uint64_t received);

struct DeliverySample
{
    TimeMs created_at_ms;
    TimeMs delivered_at_ms;
};

/// Mean of delivered - created; empty input means no value, not zero.
std::optional<TimeMs> average_e2e_delay(std::span<const DeliverySample> delivered);

/// Cumulative count of dead nodes over time.
class DeathTimeline
{
public:
    void record_death(NodeId node, TimeMs at_ms);

    const std::vector<std::pair<TimeMs, std::uint32_t>> &points() const { return m_points; }
    std::optional<TimeMs> first_death_ms() const { return m_first; }
    std::uint32_t dead_count() const { return static_cast<std::uint32_t>(m_dead.size()); }
    std::uint32_t dead_by(TimeMs t) const;

private:
    std::vector<std::pair<TimeMs, std::uint32_t>> m_points;
    std::optional<TimeMs> m_first;
    std::map<NodeId, TimeMs> m_dead;
};

/// Per-flow data-packet ledger.
struct FlowLedger
{
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::map<DropReason, std::uint64_t> dropped;

    std::uint64_t terminated() const;
};

struct MetricsReport
{
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    double pdr = 0.0;
    std::optional<TimeMs> avg_e2e_delay_ms;
    std::optional<TimeMs> max_e2e_delay_ms;
    double packet_loss_ratio = 0.0;
    DeathTimeline deaths;
    std::map<DropReason, std::uint64_t> drops;
    std::map<std::uint32_t, FlowLedger> flows;
};

/// Post-hoc metrics from the data-packet events of a run's trace.
MetricsReport compute_report(const TraceLog &trace);

/// Identifies one run in summary rows.
struct RunKey
{
    Protocol protocol = Protocol::Pdtora;
    std::string seed; // number, or "mean" for aggregate rows
    std::uint32_t num_nodes = 0;
    double max_speed_m_s = 0.0;
    double pause_s = 0.0;
};

inline constexpr std::string_view kSummaryHeader =
    "protocol,seed,num_nodes,max_speed_m_s,pause_s,pdr,avg_delay_ms,loss_ratio,first_death_ms,dead_at_end";

std::string summary_row(const RunKey &key, const MetricsReport &m);

/// Mean over runs of one sweep cell. Optional columns average the runs that
/// have a value and stay empty when none do.
std::string mean_row(const RunKey &key, std::span<const MetricsReport> runs);

inline constexpr std::string_view kTimelineHeader = "time_ms,dead_count";
void write_timeline_csv(std::ostream &out, const DeathTimeline &t);

} // namespace pdtora

#endif
