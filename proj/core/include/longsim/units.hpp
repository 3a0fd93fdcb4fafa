#pragma once

namespace longsim {

// US customary units throughout: feet, seconds, pounds (force), slugs.
inline constexpr double kGravityFtS2 = 32.174;
inline constexpr double kAirDensitySlugFt3 = 0.002378;   // sea-level standard
inline constexpr double kMphToFps = 5280.0 / 3600.0;
inline constexpr double kFpsToMph = 3600.0 / 5280.0;
inline constexpr double kMetersToFeet = 3.2808398950131235;
inline constexpr double kHpFtLbPerSec = 550.0;           // 1 hp = 550 ft-lb/s
inline constexpr double kFeetPerMile = 5280.0;

}  // namespace longsim
