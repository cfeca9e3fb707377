#include "pdtora/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace pdtora {

std::vector<NodeId> Adjacency::neighbors(NodeId a) const
{
    std::vector<NodeId> out;
    for (std::size_t b = 0; b < m_n; ++b)
        if (m_bits[a * m_n + b])
            out.push_back(static_cast<NodeId>(b));
    return out;
}

namespace {

void check_sizes(std::span<const Vec2> positions, std::span<const std::uint8_t> alive)
{
    if (positions.size() != alive.size())
        throw std::invalid_argument("unit_disc_links: positions/alive size mismatch");
}

// Squared-distance test; the boundary is inclusive.
inline bool in_range(Vec2 a, Vec2 b, double range_sq)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy <= range_sq;
}

} // namespace

Adjacency unit_disc_links(std::span<const Vec2> positions, std::span<const std::uint8_t> alive, double range_m)
{
    check_sizes(positions, alive);
    const std::size_t n = positions.size();
    const double range_sq = range_m * range_m;
    Adjacency adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i])
            continue;
        for (std::size_t j = i + 1; j < n; ++j)
            if (alive[j] && in_range(positions[i], positions[j], range_sq))
                adj.set(static_cast<NodeId>(i), static_cast<NodeId>(j), true);
    }
    return adj;
}

Adjacency unit_disc_links_parallel(std::span<const Vec2> positions, std::span<const std::uint8_t> alive,
                                   double range_m)
{
    check_sizes(positions, alive);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(positions.size());
    const double range_sq = range_m * range_m;
    Adjacency adj(static_cast<std::size_t>(n));

    // Upper triangle: iteration i writes only row i, columns above i.
#pragma omp parallel
    {
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            if (!alive[i])
                continue;
            std::uint8_t *row = adj.row(static_cast<NodeId>(i));
            for (std::ptrdiff_t j = i + 1; j < n; ++j)
                row[j] = alive[j] && in_range(positions[i], positions[j], range_sq);
        }
        // Mirror after the implicit barrier; rows are again disjoint.
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            std::uint8_t *row = adj.row(static_cast<NodeId>(i));
            for (std::ptrdiff_t j = 0; j < i; ++j)
                row[j] = adj.row(static_cast<NodeId>(j))[i];
        }
    }
    return adj;
}

std::vector<LinkTransition> diff_links(const Adjacency &before, const Adjacency &after)
{
    if (before.size() != after.size())
        throw std::invalid_argument("diff_links: size mismatch");
    std::vector<LinkTransition> out;
    const auto n = static_cast<NodeId>(before.size());
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b)
            if (before.linked(a, b) != after.linked(a, b))
                out.push_back({a, b, after.linked(a, b)});
    return out;
}

} // namespace pdtora
