#pragma once

namespace relbc {

// Vacuum speed of light, m/s (exact by definition).
inline constexpr double kSpeedOfLight = 299'792'458.0;

inline constexpr double to_us(double seconds) { return seconds * 1e6; }
inline constexpr double to_ns(double seconds) { return seconds * 1e9; }
inline constexpr double to_km(double meters) { return meters * 1e-3; }

}  // namespace relbc
