#include "pdtora/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdtora {

double distance(Vec2 a, Vec2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

Vec2 uniform_point(const MobilityParams &p, Rng &rng)
{
    std::uniform_real_distribution<double> ux(0.0, p.area_x_m);
    std::uniform_real_distribution<double> uy(0.0, p.area_y_m);
    const double x = ux(rng);
    return {x, uy(rng)};
}

Vec2 clamp_to_area(Vec2 v, const MobilityParams &p)
{
    return {std::clamp(v.x, 0.0, p.area_x_m), std::clamp(v.y, 0.0, p.area_y_m)};
}

} // namespace

MobilityState initial_mobility(const MobilityParams &p, Rng &rng)
{
    MobilityState m;
    m.position = uniform_point(p, rng);
    m.waypoint = m.position;
    return m;
}

MobilityState step_mobility(MobilityState m, TimeMs now_ms, TimeMs dt_ms, const MobilityParams &p, Rng &rng)
{
    if (!(dt_ms > 0.0))
        throw std::invalid_argument("step_mobility: dt must be positive");
    if (p.max_speed_m_s <= 0.0)
        return m;

    TimeMs t = now_ms;
    const TimeMs end = now_ms + dt_ms;
    while (t < end) {
        if (!m.moving) {
            if (t < m.paused_until_ms) {
                t = std::min(end, m.paused_until_ms);
                continue;
            }
            const double lo = std::min(p.min_speed_m_s, p.max_speed_m_s);
            std::uniform_real_distribution<double> us(lo, p.max_speed_m_s);
            m.waypoint = uniform_point(p, rng);
            m.speed_m_s = us(rng);
            m.moving = true;
        }
        const double dist = distance(m.position, m.waypoint);
        const TimeMs needed = m.speed_m_s > 0.0 ? dist / m.speed_m_s * 1000.0 : 0.0;
        if (t + needed <= end) {
            m.position = m.waypoint;
            t += needed;
            m.moving = false;
            m.paused_until_ms = t + p.pause_ms;
            if (p.pause_ms <= 0.0 && needed <= 0.0)
                break; // degenerate zero-length leg with no pause
        } else {
            const double frac = (end - t) / needed;
            m.position = clamp_to_area({m.position.x + (m.waypoint.x - m.position.x) * frac,
                                        m.position.y + (m.waypoint.y - m.position.y) * frac},
                                       p);
            t = end;
        }
    }
    return m;
}

} // namespace pdtora
