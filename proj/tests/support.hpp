#ifndef PDTORA_TESTS_SUPPORT_HPP
#define PDTORA_TESTS_SUPPORT_HPP

#include <string_view>
#include <vector>

#include "pdtora/scenario.hpp"
#include "pdtora/simulator.hpp"

namespace pdtora::testing {

/// Static scenario on an explicit link list, no generated traffic.
inline ScenarioConfig static_config(std::uint32_t n, std::vector<std::pair<NodeId, NodeId>> links,
                                    Protocol p = Protocol::Pdtora)
{
    ScenarioConfig c;
    c.num_nodes = n;
    c.links = std::move(links);
    c.max_speed_m_s = 0.0;
    c.min_speed_m_s = 0.0;
    c.protocol = p;
    c.num_flows = 0;
    c.sim_end_ms = 5000.0;
    return c;
}

inline Flow cbr(NodeId src, NodeId dst, double bits, TimeMs interval, TimeMs start, TimeMs stop)
{
    return Flow{src, dst, bits, interval, start, stop};
}

inline std::vector<const TraceRecord *> select(const TraceLog &t, std::string_view event, std::string_view kind = {})
{
    std::vector<const TraceRecord *> out;
    for (const auto &r : t.records())
        if (r.event == event && (kind.empty() || r.packet_kind == kind))
            out.push_back(&r);
    return out;
}

} // namespace pdtora::testing

#endif
