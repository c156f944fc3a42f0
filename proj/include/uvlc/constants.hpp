#pragma once

namespace uvlc {

// CODATA 2018 exact values.
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s, vacuum
inline constexpr double kPlanck = 6.62607015e-34;           // J s
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19; // C

inline constexpr const char* kCodeVersion = "uvlc 0.1.0";

} // namespace uvlc
