#ifndef PDTORA_NUMFMT_HPP
#define PDTORA_NUMFMT_HPP

#include <string>
#include <string_view>

namespace pdtora {

// Shortest round-trip decimal form. Parsing the result with parse_number
// yields the identical double, which the trace auditor relies on.
std::string format_number(double v);

double parse_number(std::string_view s);

} // namespace pdtora

#endif
