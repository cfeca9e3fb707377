#ifndef PDTORA_ENERGY_HPP
#define PDTORA_ENERGY_HPP

#include <optional>

#include "pdtora/types.hpp"

namespace pdtora {

enum class RadioOp { Tx, Rx };

/// Linear per-bit battery. residual_j never rises; dead_at_ms is set once,
/// on the drain that first brings residual_j to zero.
struct EnergyState
{
    double initial_j = 20.0;
    double residual_j = 20.0;
    double tx_cost_j_per_bit = 1.0e-6;
    double rx_cost_j_per_bit = 0.5e-6;
    std::optional<TimeMs> dead_at_ms;

    bool dead() const { return dead_at_ms.has_value(); }

    static EnergyState full(double initial_j, double tx_cost, double rx_cost)
    {
        return {initial_j, initial_j, tx_cost, rx_cost, std::nullopt};
    }
};

/// Returns the joules actually removed (less than the nominal cost when the
/// battery runs out mid-packet, zero when already dead).
double drain(EnergyState &state, RadioOp op, double size_bits, TimeMs now);

double residual_fraction(const EnergyState &state);

} // namespace pdtora

#endif
