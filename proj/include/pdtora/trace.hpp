#ifndef PDTORA_TRACE_HPP
#define PDTORA_TRACE_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdtora/types.hpp"

namespace pdtora {

/// One protocol event. CSV columns, in order:
///   time_ms,node,event,packet_kind,src,dst,detail
/// detail is a ';'-separated list of key=value pairs and never contains ','.
struct TraceRecord
{
    TimeMs time_ms = 0.0;
    NodeId node = 0;
    std::string event;
    std::string packet_kind;
    std::optional<NodeId> src;
    std::optional<NodeId> dst;
    std::string detail;

    bool operator==(const TraceRecord &) const = default;

    /// Value of key in detail, if present.
    std::optional<std::string_view> field(std::string_view key) const;
    double number(std::string_view key) const; // throws if absent
};

inline constexpr std::string_view kTraceHeader = "time_ms,node,event,packet_kind,src,dst,detail";

class TraceLog
{
public:
    void add(TraceRecord r) { m_records.push_back(std::move(r)); }
    const std::vector<TraceRecord> &records() const { return m_records; }
    std::size_t size() const { return m_records.size(); }

    void write_csv(std::ostream &out) const;
    std::string to_csv() const;
    static TraceLog parse_csv(std::istream &in);
    static TraceLog parse_csv(std::string_view text);

private:
    std::vector<TraceRecord> m_records;
};

std::string format_record(const TraceRecord &r);
TraceRecord parse_record(std::string_view line);

/// Builds detail strings: key=value;key=value.
class Detail
{
public:
    Detail &add(std::string_view key, std::string_view value);
    Detail &add(std::string_view key, double value);
    Detail &add(std::string_view key, std::uint64_t value);
    Detail &add(std::string_view key, NodeId value) { return add(key, static_cast<std::uint64_t>(value)); }
    std::string str() && { return std::move(m_text); }
    const std::string &str() const & { return m_text; }

private:
    std::string m_text;
};

// ---- invariant auditor -------------------------------------------------------

struct AuditReport
{
    std::size_t qry_admissions = 0;
    std::size_t qry_transmissions = 0;
    std::vector<std::string> budget_violations;
    std::vector<std::string> power_violations;
    std::vector<std::string> dead_node_violations;

    bool clean() const
    {
        return budget_violations.empty() && power_violations.empty() && dead_node_violations.empty();
    }
};

/// Checks a finished trace: admitted QRYs lose exactly the admitting node's
/// NTT when qos_enabled (and keep their budget otherwise), no forwarded
/// budget is negative, no QRY is admitted or relayed by a node below the
/// query's power threshold, and no dead node transmits.
AuditReport audit_trace(const TraceLog &trace, bool qos_enabled);

} // namespace pdtora

#endif
