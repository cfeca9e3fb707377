#ifndef PDTORA_RADIO_HPP
#define PDTORA_RADIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pdtora/mobility.hpp"
#include "pdtora/types.hpp"

namespace pdtora {

/// Symmetric n x n link matrix, row-major.
class Adjacency
{
public:
    Adjacency() = default;
    explicit Adjacency(std::size_t n) : m_n(n), m_bits(n * n, 0) {}

    std::size_t size() const { return m_n; }
    bool linked(NodeId a, NodeId b) const { return m_bits[a * m_n + b] != 0; }
    void set(NodeId a, NodeId b, bool up)
    {
        m_bits[a * m_n + b] = up;
        m_bits[b * m_n + a] = up;
    }
    std::vector<NodeId> neighbors(NodeId a) const;
    /// Row a of the matrix, for kernels that fill rows independently.
    std::uint8_t *row(NodeId a) { return m_bits.data() + a * m_n; }

    bool operator==(const Adjacency &) const = default;

private:
    std::size_t m_n = 0;
    std::vector<std::uint8_t> m_bits;
};

struct LinkTransition
{
    NodeId a;
    NodeId b;
    bool up;

    bool operator==(const LinkTransition &) const = default;
};

/// Unit-disc links: up iff both ends are alive and distance <= range_m.
/// Serial reference kernel.
Adjacency unit_disc_links(std::span<const Vec2> positions, std::span<const std::uint8_t> alive, double range_m);

/// Same result as unit_disc_links, rows computed in an OpenMP parallel loop.
Adjacency unit_disc_links_parallel(std::span<const Vec2> positions, std::span<const std::uint8_t> alive,
                                   double range_m);

/// Pairwise differences (a < b), in (a, b) order.
std::vector<LinkTransition> diff_links(const Adjacency &before, const Adjacency &after);

} // namespace pdtora

#endif
