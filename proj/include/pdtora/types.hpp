#ifndef PDTORA_TYPES_HPP
#define PDTORA_TYPES_HPP

#include <cstdint>
#include <string_view>

namespace pdtora {

using NodeId = std::uint32_t;

/// Simulation time and durations, in milliseconds.
using TimeMs = double;

enum class Protocol { Tora, Pdtora };

Protocol parse_protocol(std::string_view s);
std::string_view to_string(Protocol p);

} // namespace pdtora

#endif
