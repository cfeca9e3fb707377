#include "pdtora/trace.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pdtora/numfmt.hpp"

namespace pdtora {

std::optional<std::string_view> TraceRecord::field(std::string_view key) const
{
    std::string_view d = detail;
    while (!d.empty()) {
        const auto semi = d.find(';');
        const std::string_view item = d.substr(0, semi);
        const auto eq = item.find('=');
        if (eq != std::string_view::npos && item.substr(0, eq) == key)
            return item.substr(eq + 1);
        if (semi == std::string_view::npos)
            break;
        d.remove_prefix(semi + 1);
    }
    return std::nullopt;
}

double TraceRecord::number(std::string_view key) const
{
    const auto v = field(key);
    if (!v)
        throw std::out_of_range("trace record has no field '" + std::string(key) + "'");
    return parse_number(*v);
}

Detail &Detail::add(std::string_view key, std::string_view value)
{
    if (!m_text.empty())
        m_text += ';';
    m_text.append(key);
    m_text += '=';
    m_text.append(value);
    return *this;
}

Detail &Detail::add(std::string_view key, double value)
{
    return add(key, std::string_view(format_number(value)));
}

Detail &Detail::add(std::string_view key, std::uint64_t value)
{
    return add(key, std::string_view(std::to_string(value)));
}

std::string format_record(const TraceRecord &r)
{
    std::string line = format_number(r.time_ms);
    line += ',';
    line += std::to_string(r.node);
    line += ',';
    line += r.event;
    line += ',';
    line += r.packet_kind;
    line += ',';
    if (r.src)
        line += std::to_string(*r.src);
    line += ',';
    if (r.dst)
        line += std::to_string(*r.dst);
    line += ',';
    line += r.detail;
    return line;
}

namespace {

std::optional<NodeId> parse_node(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    return static_cast<NodeId>(parse_number(s));
}

} // namespace

TraceRecord parse_record(std::string_view line)
{
    std::string_view cols[7];
    for (int i = 0; i < 6; ++i) {
        const auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw std::invalid_argument("trace line has fewer than 7 columns: '" + std::string(line) + "'");
        cols[i] = line.substr(0, comma);
        line.remove_prefix(comma + 1);
    }
    cols[6] = line;
    TraceRecord r;
    r.time_ms = parse_number(cols[0]);
    r.node = static_cast<NodeId>(parse_number(cols[1]));
    r.event = std::string(cols[2]);
    r.packet_kind = std::string(cols[3]);
    r.src = parse_node(cols[4]);
    r.dst = parse_node(cols[5]);
    r.detail = std::string(cols[6]);
    return r;
}

void TraceLog::write_csv(std::ostream &out) const
{
    out << kTraceHeader << '\n';
    for (const auto &r : m_records)
        out << format_record(r) << '\n';
}

std::string TraceLog::to_csv() const
{
    std::ostringstream o;
    write_csv(o);
    return o.str();
}

TraceLog TraceLog::parse_csv(std::istream &in)
{
    TraceLog log;
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw std::invalid_argument("trace CSV: missing or wrong header");
    while (std::getline(in, line)) {
        if (!line.empty())
            log.add(parse_record(line));
    }
    return log;
}

TraceLog TraceLog::parse_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_csv(in);
}

AuditReport audit_trace(const TraceLog &trace, bool qos_enabled)
{
    AuditReport rep;
    std::set<NodeId> dead;
    auto where = [](const TraceRecord &r) { return format_record(r); };

    for (const auto &r : trace.records()) {
        if (r.event == "death") {
            dead.insert(r.node);
            continue;
        }
        if (r.event == "tx" && dead.contains(r.node))
            rep.dead_node_violations.push_back(where(r));

        if (r.event == "qry_admit") {
            ++rep.qry_admissions;
            const double in = r.number("budget_in");
            const double out = r.number("budget_out");
            const double ntt = r.number("ntt");
            const double expect = qos_enabled ? in - ntt : in;
            if (out != expect || out < 0.0)
                rep.budget_violations.push_back(where(r));
            if (qos_enabled && r.number("residual") < r.number("min_power"))
                rep.power_violations.push_back(where(r));
        } else if (r.event == "tx" && r.packet_kind == "QRY") {
            ++rep.qry_transmissions;
            if (r.number("budget") < 0.0)
                rep.budget_violations.push_back(where(r));
            const bool relayed = r.src && *r.src != r.node;
            if (qos_enabled && relayed && r.number("residual") < r.number("min_power"))
                rep.power_violations.push_back(where(r));
        }
    }
    return rep;
}

} // namespace pdtora
