#include "pdtora/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdtora {

double drain(EnergyState &state, RadioOp op, double size_bits, TimeMs now)
{
    if (state.dead())
        return 0.0;
    if (!(size_bits > 0.0))
        throw std::invalid_argument("drain: size_bits must be positive");
    const double cost = (op == RadioOp::Tx ? state.tx_cost_j_per_bit : state.rx_cost_j_per_bit) * size_bits;
    const double taken = std::min(cost, state.residual_j);
    state.residual_j -= taken;
    if (state.residual_j <= 0.0) {
        state.residual_j = 0.0;
        state.dead_at_ms = now;
    }
    return taken;
}

double residual_fraction(const EnergyState &state)
{
    if (!(state.initial_j > 0.0))
        throw std::invalid_argument("residual_fraction: initial energy must be positive");
    return state.residual_j / state.initial_j;
}

} // namespace pdtora
