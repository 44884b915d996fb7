#pragma once

namespace dfn::phys {

inline constexpr double F = 96485.33212;      // Faraday constant [C/mol]
inline constexpr double R = 8.31446261815324; // universal gas constant [J/(mol K)]

} // namespace dfn::phys
