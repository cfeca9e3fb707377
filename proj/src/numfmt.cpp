#include "pdtora/numfmt.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace pdtora {

std::string format_number(double v)
{
    if (v == 0.0)
        return "0"; // folds -0
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw std::runtime_error("format_number: conversion failed");
    return std::string(buf.data(), end);
}

double parse_number(std::string_view s)
{
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

} // namespace pdtora
