#ifndef PDTORA_MOBILITY_HPP
#define PDTORA_MOBILITY_HPP

#include <random>

#include "pdtora/types.hpp"

namespace pdtora {

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2 &) const = default;
};

double distance(Vec2 a, Vec2 b);

struct MobilityParams
{
    double area_x_m = 670.0;
    double area_y_m = 670.0;
    double min_speed_m_s = 1.0;
    double max_speed_m_s = 20.0;
    TimeMs pause_ms = 10000.0;
};

/// Random waypoint state of one node.
struct MobilityState
{
    Vec2 position;
    Vec2 waypoint;
    double speed_m_s = 0.0;
    TimeMs paused_until_ms = 0.0;
    bool moving = false;
};

using Rng = std::mt19937_64;

/// Uniform start position; the first leg is drawn on the first step.
MobilityState initial_mobility(const MobilityParams &p, Rng &rng);

/// Advances from now_ms to now_ms + dt_ms. On reaching the waypoint the node
/// pauses for pause_ms, then draws a uniform waypoint and a uniform speed in
/// [min_speed, max_speed]. A zero max speed never moves.
MobilityState step_mobility(MobilityState m, TimeMs now_ms, TimeMs dt_ms, const MobilityParams &p, Rng &rng);

} // namespace pdtora

#endif
